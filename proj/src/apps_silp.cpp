#include "sosinterp/apps/silp.hpp"

#include <algorithm>

#include "sosinterp/chebkit/adaptive.hpp"

namespace sosinterp::apps {

SilpProblem build_silp_sdp(const SemiInfiniteProgram& sip, double tol) {
  if (!(tol > 0)) throw InvalidArgument("tolerance must be positive");
  if (sip.num_vars < 1) throw InvalidArgument("semi-infinite program needs at least one variable");
  if (sip.rhs.size() != Index(sip.rows.size())) throw InvalidArgument("one right-hand side per row expected");
  if (sip.objective.size() != 0 && sip.objective.size() != sip.num_vars)
    throw InvalidArgument("objective length does not match the variable count");

  SilpProblem out;
  out.rhs = sip.rhs;
  auto& p = out.sdp;
  p.set_sense(sdp::Sense::Min);
  out.x_block = p.add_free_block(sip.num_vars);
  for (Index i = 0; i < sip.objective.size(); ++i)
    if (sip.objective(i) != 0.0) p.add_objective_entry(out.x_block, i, i, sip.objective(i));

  for (std::size_t j = 0; j < sip.rows.size(); ++j) {
    const auto& row = sip.rows[j];
    if (Index(row.size()) != sip.num_vars) throw InvalidArgument("row " + std::to_string(j) + " has the wrong length");
    std::vector<Poly> entries;
    Index n = 1;
    for (std::size_t i = 0; i < row.size(); ++i) {
      try {
        entries.push_back(cheb::adaptive_interpolate<double>(row[i], tol).interpolant);
      } catch (const ConvergenceError& e) {
        throw ConvergenceError("row " + std::to_string(j) + ", entry " + std::to_string(i) + ": " + e.what(),
                               e.residual());
      }
      n = std::max(n, entries.back().degree());
    }
    const Grid grid = Grid::second_kind(n);
    MatrixXd values(grid.size(), sip.num_vars);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const Poly& e = entries[i];
      values.col(Index(i)) = e.grid() == grid ? e.values() : cheb::evaluate(e, grid.points());
    }
    std::vector<Index> rows;
    for (Index l = 0; l < grid.size(); ++l) {
      const Index r = p.add_constraint(sip.rhs(Index(j)));
      for (Index i = 0; i < sip.num_vars; ++i)
        if (values(l, i) != 0.0) p.add_entry(r, out.x_block, i, i, values(l, i));
      rows.push_back(r);
    }
    out.cones.push_back(attach_interval_cone(p, IntervalCone(grid), rows));
    out.grids.push_back(grid);
    out.row_values.push_back(std::move(values));
  }
  if (sip.extra) sip.extra(p, out.x_block);
  return out;
}

VectorXd silp_solution(const SilpProblem& prob, const sdp::SdpSolution& sol) {
  require_usable(sol, "semi-infinite program");
  return sol.X.at(std::size_t(prob.x_block));
}

Poly silp_residual(const SilpProblem& prob, Index row, const sdp::SdpSolution& sol) {
  if (row < 0 || row >= Index(prob.grids.size())) throw InvalidArgument("row index out of range");
  const VectorXd x = silp_solution(prob, sol);
  const VectorXd v = (prob.rhs(row) - (prob.row_values[std::size_t(row)] * x).array()).matrix();
  return Poly(prob.grids[std::size_t(row)], v);
}

}  // namespace sosinterp::apps
