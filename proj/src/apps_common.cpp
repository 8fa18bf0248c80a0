#include "sosinterp/apps/common.hpp"

#include <algorithm>
#include <cmath>

#include "sosinterp/chebkit/roots.hpp"

namespace sosinterp::apps {

void require_usable(const sdp::SdpSolution& sol, const std::string& what) {
  if (sol.status != sdp::Status::Optimal && sol.status != sdp::Status::SlowProgress)
    throw UnsolvedError(what, sol.status);
}

ConeAttachment attach_interval_cone(sdp::BlockSdpProblem& p, IntervalCone cone, std::vector<Index> rows,
                                    double scale) {
  if (Index(rows.size()) != cone.grid().size()) throw InvalidArgument("one constraint row per cone grid point expected");
  ConeAttachment out{std::move(cone), {}, std::move(rows)};
  for (const auto& member : out.cone.members()) {
    const Index blk = p.add_psd_block(member.block_size());
    out.blocks.push_back(blk);
    for (Index l = 0; l < member.num_constraints(); ++l) {
      VectorXd u = member.factor(l);
      if (u.cwiseAbs().maxCoeff() == 0.0) continue;
      p.add_rank_one(out.rows[std::size_t(l)], blk, std::move(u), scale);
    }
  }
  return out;
}

VectorXd cone_values(const ConeAttachment& c, const sdp::SdpSolution& sol) {
  std::vector<MatrixXd> X;
  for (Index blk : c.blocks) X.push_back(sol.X.at(std::size_t(blk)));
  return c.cone.apply(X);
}

std::vector<double> contact_points(const Poly& r, double rel_tol, double dedup) {
  const double scale = r.values().cwiseAbs().maxCoeff();
  if (scale == 0.0) throw ZeroPolynomialError();
  cheb::RootOptions opt;
  opt.dedup_tol = dedup;
  std::vector<double> out;
  for (double t : cheb::local_minima(r, -1.0, 1.0, opt))
    if (std::abs(r(t)) <= rel_tol * scale) out.push_back(t);
  return out;
}

Certificate certify_nonnegative(const Poly& p, const sdp::SolverConfig& cfg) {
  const Index n = p.degree();
  const Grid grid = Grid::first_kind(n);
  const VectorXd target = cheb::evaluate(p, grid.points());
  sdp::BlockSdpProblem prob;
  std::vector<Index> rows;
  for (Index l = 0; l < grid.size(); ++l) rows.push_back(prob.add_constraint(target(l)));
  const auto att = attach_interval_cone(prob, IntervalCone(grid), rows);
  const auto sol = sdp::solve(prob, cfg);
  Certificate c;
  c.status = sol.status;
  if (sol.status != sdp::Status::Optimal && sol.status != sdp::Status::SlowProgress) return c;
  for (Index blk : att.blocks) c.blocks.push_back(sol.X[std::size_t(blk)]);
  c.residual = (att.cone.apply(c.blocks) - target).cwiseAbs().maxCoeff() / (1.0 + target.cwiseAbs().maxCoeff());
  c.certified = sol.status == sdp::Status::Optimal;
  return c;
}

}  // namespace sosinterp::apps
