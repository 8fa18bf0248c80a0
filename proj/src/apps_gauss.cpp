#include "sosinterp/apps/gauss.hpp"
#include "sosinterp/chebkit/transform.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace sosinterp::apps {

std::vector<double> recurrence_roots(const VectorXd& alpha, const VectorXd& beta) {
  const Index k = alpha.size();
  if (k < 1) throw InvalidArgument("recurrence needs at least one coefficient");
  if (beta.size() < k - 1) throw InvalidArgument("recurrence needs k - 1 off-diagonal coefficients");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es;
  es.computeFromTridiagonal(alpha, beta.head(k - 1), Eigen::EigenvaluesOnly);
  std::vector<double> r(es.eigenvalues().data(), es.eigenvalues().data() + k);
  for (double& t : r) {
    // p_k and p_k' by the three-term recurrence
    double p0 = 1, p1 = t - alpha(0), d0 = 0, d1 = 1;
    for (Index j = 1; j < k; ++j) {
      const double b2 = beta(j - 1) * beta(j - 1);
      const double p2 = (t - alpha(j)) * p1 - b2 * p0;
      const double d2 = p1 + (t - alpha(j)) * d1 - b2 * d0;
      p0 = p1, p1 = p2, d0 = d1, d1 = d2;
    }
    if (d1 != 0 && std::isfinite(p1 / d1)) t -= p1 / d1;
  }
  std::sort(r.begin(), r.end());
  return r;
}

std::vector<double> legendre_roots(Index k) {
  if (k < 1) throw InvalidArgument("legendre_roots needs k >= 1");
  VectorXd alpha = VectorXd::Zero(k), beta = VectorXd::Zero(k);
  for (Index j = 1; j < k; ++j) beta(j - 1) = double(j) / std::sqrt(4.0 * double(j) * double(j) - 1.0);
  auto r = recurrence_roots(alpha, beta);
  // exact symmetry about 0
  for (Index i = 0; i < k / 2; ++i) {
    const double s = 0.5 * (r[std::size_t(k - 1 - i)] - r[std::size_t(i)]);
    r[std::size_t(i)] = -s;
    r[std::size_t(k - 1 - i)] = s;
  }
  if (k % 2 == 1) r[std::size_t(k / 2)] = 0.0;
  return r;
}

std::vector<double> jacobi01_roots(Index k) {
  if (k < 1) throw InvalidArgument("jacobi01_roots needs k >= 1");
  VectorXd alpha(k), beta = VectorXd::Zero(k);
  for (Index j = 0; j < k; ++j) alpha(j) = 1.0 / (double(2 * j + 1) * double(2 * j + 3));
  for (Index j = 1; j < k; ++j) beta(j - 1) = std::sqrt(double(j) * double(j + 1)) / double(2 * j + 1);
  return recurrence_roots(alpha, beta);
}

HermiteInterpolant::HermiteInterpolant(std::vector<double> nodes, const Sampler& f, const Sampler& df) {
  const Index n = Index(nodes.size());
  if (n == 0) throw InvalidArgument("hermite interpolation needs a node");
  for (Index i = 2; i < n; ++i)
    if (nodes[std::size_t(i)] == nodes[std::size_t(i - 2)]) throw InvalidArgument("hermite nodes may repeat at most twice");
  MatrixXd V(n, n);
  VectorXd rhs(n);
  for (Index i = 0; i < n; ++i) {
    const double t = nodes[std::size_t(i)];
    const bool slope = i > 0 && nodes[std::size_t(i - 1)] == t;
    const MatrixXd D = sos::chebyshev_T_derivatives(n - 1, slope ? 1 : 0, t);
    // slope rows grow like n^2; scale them to unit size
    const double s = slope ? 1.0 / std::max(1.0, D.row(1).cwiseAbs().maxCoeff()) : 1.0;
    V.row(i) = s * D.row(slope ? 1 : 0);
    rhs(i) = s * (slope ? df(t) : f(t));
  }
  coef_ = V.colPivHouseholderQr().solve(rhs);
}

double HermiteInterpolant::operator()(double t) const { return cheb::clenshaw(coef_, t); }

std::vector<double> hermite_l1_nodes(Index n) {
  if (n < 0) throw InvalidArgument("degree must be nonnegative");
  if (n % 2 == 1) return legendre_roots((n + 1) / 2);
  std::vector<double> r{-1.0};
  if (n > 0) {
    const auto j = jacobi01_roots(n / 2);
    r.insert(r.end(), j.begin(), j.end());
  }
  return r;
}

Poly hermite_l1_oracle(const Sampler& f, const Sampler& df, Index n) {
  std::vector<double> nodes;
  for (double t : hermite_l1_nodes(n)) {
    nodes.push_back(t);
    if (t != -1.0) nodes.push_back(t);
  }
  const HermiteInterpolant h(std::move(nodes), f, df);
  return Poly::from_function(Grid::first_kind(n), [&](double t) { return h(t); });
}

}  // namespace sosinterp::apps
