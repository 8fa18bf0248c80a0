#include "sosinterp/apps/envelope.hpp"

#include <algorithm>
#include <random>

#include "sosinterp/chebkit/quadrature.hpp"
#include "sosinterp/chebkit/transform.hpp"

namespace sosinterp::apps {

std::vector<Poly> random_chebyshev_polynomials(Index m, Index d, std::uint64_t seed) {
  if (m < 1 || d < 0) throw InvalidArgument("need m >= 1 polynomials of degree d >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coef(-9, 9);
  std::vector<Poly> out;
  for (Index i = 0; i < m; ++i) {
    VectorXd c(d + 1);
    for (Index j = 0; j <= d; ++j) c(j) = coef(rng);
    out.push_back(Poly::from_function(Grid::first_kind(d), [&](double t) { return cheb::clenshaw(c, t); }));
  }
  return out;
}

EnvelopeProblem envelope_dual(const std::vector<Poly>& polys, Index n, const EnvelopeOptions& opt) {
  if (polys.empty()) throw InvalidArgument("envelope needs at least one polynomial");
  for (const auto& p : polys)
    if (p.degree() > n) throw InvalidArgument("envelope grid degree is below a polynomial degree");
  EnvelopeProblem out;
  out.grid = Grid::first_kind(n);
  out.weights = cheb::clenshaw_curtis_weights(out.grid).w;
  out.nonpositive = opt.nonpositive;
  const Index N = out.grid.size();
  const Index m = Index(polys.size());
  out.data.resize(N, m);
  for (Index i = 0; i < m; ++i) out.data.col(i) = cheb::evaluate(polys[std::size_t(i)], out.grid.points());
  if (opt.nonpositive) out.shift = out.data.maxCoeff();

  auto& sdp = out.sdp;
  sdp.set_sense(sdp::Sense::Max);
  if (opt.nonpositive) {
    out.value_block = sdp.add_nonneg_block(N);
    for (Index l = 0; l < N; ++l) sdp.add_objective_entry(out.value_block, l, l, -out.weights(l));
  } else {
    out.value_block = sdp.add_free_block(N);
    for (Index l = 0; l < N; ++l) sdp.add_objective_entry(out.value_block, l, l, out.weights(l));
  }
  const double coef = opt.nonpositive ? -1.0 : 1.0;
  const IntervalCone cone(out.grid);
  for (Index i = 0; i < m; ++i) {
    std::vector<Index> rows;
    for (Index l = 0; l < N; ++l) {
      const Index r = sdp.add_constraint(out.data(l, i) - out.shift);
      sdp.add_entry(r, out.value_block, l, l, coef);
      rows.push_back(r);
    }
    out.cones.push_back(attach_interval_cone(sdp, cone, rows));
    out.rows.push_back(std::move(rows));
  }
  return out;
}

Poly envelope_recover(const EnvelopeProblem& prob, const sdp::SdpSolution& sol) {
  require_usable(sol, "envelope");
  const VectorXd& v = sol.X.at(std::size_t(prob.value_block));
  if (prob.nonpositive) return Poly(prob.grid, (prob.shift - v.array()).matrix());
  return Poly(prob.grid, v);
}

MatrixXd envelope_multipliers(const EnvelopeProblem& prob, const sdp::SdpSolution& sol) {
  MatrixXd y(prob.grid.size(), Index(prob.rows.size()));
  for (std::size_t i = 0; i < prob.rows.size(); ++i)
    for (std::size_t l = 0; l < prob.rows[i].size(); ++l) y(Index(l), Index(i)) = sol.y(prob.rows[i][l]);
  return y;
}

}  // namespace sosinterp::apps
