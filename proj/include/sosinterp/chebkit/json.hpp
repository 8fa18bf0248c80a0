#pragma once

#include <json.hpp>

#include "sosinterp/chebkit/interpolant.hpp"

namespace sosinterp::cheb {

/// {kind, n, values[]}; General grids also carry points[].
nlohmann::json to_json(const Interpolant<double>& p);
Interpolant<double> interpolant_from_json(const nlohmann::json& j);

}  // namespace sosinterp::cheb
