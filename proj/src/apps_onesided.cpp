#include "sosinterp/apps/onesided.hpp"

#include "sosinterp/chebkit/quadrature.hpp"

namespace sosinterp::apps {

OnesidedProblem onesided_dual(const Poly& f, Index degree) {
  if (!f.grid().is_chebyshev()) throw InvalidArgument("one-sided target must live on a Chebyshev grid");
  const Index N = f.degree();
  if (degree < 0 || degree >= N) throw InvalidArgument("approximant degree must satisfy 0 <= degree < target degree");
  OnesidedProblem out;
  const Grid fine = Grid::first_kind(N);
  out.target = f.grid() == fine ? f : cheb::resample(f, fine);
  out.coarse = Grid::first_kind(degree);
  out.B = cheb::upsample_matrix(out.coarse, fine).B;
  out.weights = cheb::clenshaw_curtis_weights(fine).w;

  auto& sdp = out.sdp;
  sdp.set_sense(sdp::Sense::Max);
  out.bound_block = sdp.add_free_block(fine.size());
  out.approx_block = sdp.add_free_block(out.coarse.size());
  for (Index l = 0; l < fine.size(); ++l) sdp.add_objective_entry(out.bound_block, l, l, out.weights(l));
  for (Index l = 0; l < fine.size(); ++l) {
    const Index r = sdp.add_constraint(out.target.values()(l));
    sdp.add_entry(r, out.bound_block, l, l, 1.0);
    out.sos_rows.push_back(r);
  }
  for (Index l = 0; l < fine.size(); ++l) {
    const Index r = sdp.add_constraint(0.0);
    sdp.add_entry(r, out.bound_block, l, l, 1.0);
    for (Index j = 0; j < out.coarse.size(); ++j)
      if (out.B(l, j) != 0.0) sdp.add_entry(r, out.approx_block, j, j, -out.B(l, j));
    out.coupling_rows.push_back(r);
  }
  out.cone = attach_interval_cone(sdp, IntervalCone(fine), out.sos_rows);
  return out;
}

Poly onesided_recover(const OnesidedProblem& prob, const sdp::SdpSolution& sol) {
  require_usable(sol, "one-sided approximation");
  return Poly(prob.coarse, sol.X.at(std::size_t(prob.approx_block)));
}

Poly onesided_gap(const OnesidedProblem& prob, const sdp::SdpSolution& sol) {
  const Poly p = onesided_recover(prob, sol);
  return Poly(prob.target.grid(), prob.target.values() - prob.B * p.values());
}

std::vector<double> onesided_contacts(const OnesidedProblem& prob, const sdp::SdpSolution& sol, double rel_tol) {
  return contact_points(onesided_gap(prob, sol), rel_tol);
}

double onesided_l1(const OnesidedProblem& prob, const sdp::SdpSolution& sol) {
  return prob.weights.dot(onesided_gap(prob, sol).values());
}

}  // namespace sosinterp::apps
