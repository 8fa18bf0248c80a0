#pragma once

#include <json.hpp>

#include "sosinterp/sdp/solver.hpp"

namespace sosinterp::sdp {

/// Result record {status, iterations, pinf, dinf, gap, objective}.
nlohmann::json result_record(const SdpSolution& sol);

}  // namespace sosinterp::sdp
