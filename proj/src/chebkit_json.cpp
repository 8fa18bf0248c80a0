#include "sosinterp/chebkit/json.hpp"

#include <vector>

namespace sosinterp::cheb {

namespace {

std::vector<double> to_std(const Vec<double>& v) { return {v.data(), v.data() + v.size()}; }

Vec<double> to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Vec<double>>(v.data(), static_cast<Index>(v.size()));
}

}  // namespace

nlohmann::json to_json(const Interpolant<double>& p) {
  nlohmann::json j;
  j["kind"] = to_string(p.grid().kind());
  j["n"] = p.degree();
  j["values"] = to_std(p.values());
  if (p.grid().kind() == GridKind::General) j["points"] = to_std(p.grid().points());
  return j;
}

Interpolant<double> interpolant_from_json(const nlohmann::json& j) {
  try {
    const GridKind kind = grid_kind_from_string(j.at("kind").get<std::string>());
    const Index n = j.at("n").get<Index>();
    auto values = to_eigen(j.at("values").get<std::vector<double>>());
    if (kind == GridKind::General) {
      auto grid = InterpolationGrid<double>::general(to_eigen(j.at("points").get<std::vector<double>>()));
      if (grid.degree() != n) throw InvalidArgument("interpolant JSON: n does not match points");
      return Interpolant<double>(std::move(grid), std::move(values));
    }
    return Interpolant<double>(chebyshev_grid<double>(kind, n), std::move(values));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("interpolant JSON: ") + e.what());
  }
}

}  // namespace sosinterp::cheb
