#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sosinterp/chebkit/transform.hpp"

namespace sosinterp::cheb {

struct RootOptions {
  double trim_tol = 1e-13;
  double imag_tol = 1e-8;
  double interval_slack = 1e-8;
  double dedup_tol = 1e-10;
};

/// Parlett-Reinsch diagonal similarity balancing, in place.
template <typename Scalar>
void balance_matrix(Mat<Scalar>& A) {
  const Scalar radix(2);
  bool converged = false;
  while (!converged) {
    converged = true;
    for (Index i = 0; i < A.rows(); ++i) {
      const Scalar c = A.col(i).template lpNorm<1>() - std::abs(A(i, i));
      const Scalar r = A.row(i).template lpNorm<1>() - std::abs(A(i, i));
      if (c == Scalar(0) || r == Scalar(0)) continue;
      Scalar g = r / radix, f(1);
      const Scalar s = c + r;
      Scalar cc = c;
      while (cc < g) {
        f *= radix;
        cc *= radix * radix;
      }
      g = r * radix;
      while (cc > g) {
        f /= radix;
        cc /= radix * radix;
      }
      if ((cc + r) / f < Scalar(0.95) * s) {
        converged = false;
        A.row(i) /= f;
        A.col(i) *= f;
      }
    }
  }
}

/// Colleague matrix of sum_j c_j T_j; c must have a nonzero last entry and size >= 3.
template <typename Scalar>
Mat<Scalar> colleague_matrix(const Vec<Scalar>& c) {
  const Index d = c.size() - 1;
  Mat<Scalar> A = Mat<Scalar>::Zero(d, d);
  A(0, 1) = Scalar(1);
  for (Index j = 1; j < d - 1; ++j) {
    A(j, j - 1) = Scalar(0.5);
    A(j, j + 1) = Scalar(0.5);
  }
  A(d - 1, d - 2) += Scalar(0.5);
  for (Index k = 0; k < d; ++k) A(d - 1, k) -= c(k) / (Scalar(2) * c(d));
  return A;
}

/// Real roots of a Chebyshev series inside [a - slack, b + slack], unpolished and unsorted.
/// Trailing coefficients below trim_tol * max|c| are dropped first.
template <typename Scalar>
std::vector<Scalar> chebyshev_series_roots(const Vec<Scalar>& coeffs, Scalar a, Scalar b,
                                           const RootOptions& opt = {}) {
  const Scalar scale = coeffs.cwiseAbs().maxCoeff();
  if (scale == Scalar(0)) throw ZeroPolynomialError();
  const Index len = chopped_length(coeffs, Scalar(opt.trim_tol), scale);
  const Vec<Scalar> c = coeffs.head(len);
  const Index d = len - 1;
  std::vector<Scalar> out;
  const Scalar lo = a - Scalar(opt.interval_slack), hi = b + Scalar(opt.interval_slack);
  if (d == 0) return out;
  if (d == 1) {
    const Scalar r = -c(0) / c(1);
    if (r >= lo && r <= hi) out.push_back(r);
    return out;
  }
  Mat<Scalar> A = colleague_matrix(c);
  balance_matrix(A);
  Eigen::EigenSolver<Mat<Scalar>> es(A, false);
  if (es.info() != Eigen::Success) throw Error("colleague matrix eigenvalue iteration failed");
  for (const auto& z : es.eigenvalues()) {
    if (std::abs(z.imag()) > Scalar(opt.imag_tol)) continue;
    if (z.real() >= lo && z.real() <= hi) out.push_back(z.real());
  }
  return out;
}

/// Value and derivative of the barycentric interpolant at t (t off the grid).
template <typename Scalar>
std::pair<Scalar, Scalar> barycentric_value_and_slope(const Interpolant<Scalar>& p, Scalar t) {
  const auto& x = p.grid().points();
  const auto& w = p.barycentric_weights();
  const auto& f = p.values();
  Scalar N(0), D(0), dN(0), dD(0);
  for (Index j = 0; j < x.size(); ++j) {
    const Scalar r = Scalar(1) / (t - x(j));
    const Scalar c = w(j) * r;
    N += c * f(j);
    D += c;
    dN -= c * r * f(j);
    dD -= c * r;
  }
  return {N / D, (dN * D - N * dD) / (D * D)};
}

namespace detail {

template <typename Scalar, typename ValueSlope>
Scalar newton_polish(Scalar r, Scalar a, Scalar b, ValueSlope&& vs) {
  const auto [v, s] = vs(r);
  if (s == Scalar(0) || !std::isfinite(v) || !std::isfinite(s)) return r;
  const Scalar next = r - v / s;
  if (!(next >= a && next <= b)) return std::clamp(r, a, b);
  const auto [v2, s2] = vs(next);
  (void)s2;
  return std::abs(v2) <= std::abs(v) ? next : r;
}

template <typename Scalar>
std::vector<Scalar> sort_unique(std::vector<Scalar> r, Scalar tol) {
  std::sort(r.begin(), r.end());
  std::vector<Scalar> out;
  for (Scalar x : r)
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  return out;
}

template <typename Scalar>
bool on_grid(const InterpolationGrid<Scalar>& g, Scalar t) {
  for (Index i = 0; i < g.size(); ++i)
    if (g[i] == t) return true;
  return false;
}

}  // namespace detail

/// Real roots of p in [a, b], ascending.
///
/// Colleague-matrix eigenvalues of the Chebyshev coefficients, then one Newton
/// step on the barycentric form.
template <typename Scalar>
std::vector<Scalar> interpolant_roots(const Interpolant<Scalar>& p, Scalar a = Scalar(-1), Scalar b = Scalar(1),
                                      const RootOptions& opt = {}) {
  if (!(a <= b) || a < Scalar(-1) || b > Scalar(1)) throw InvalidArgument("root interval must lie in [-1, 1]");
  if (p.values().cwiseAbs().maxCoeff() == Scalar(0)) throw ZeroPolynomialError();
  const Vec<Scalar> c = chebyshev_coefficients(p);
  std::vector<Scalar> raw = chebyshev_series_roots(c, a, b, opt);
  for (Scalar& r : raw) {
    r = std::clamp(r, a, b);
    if (detail::on_grid(p.grid(), r)) continue;
    r = detail::newton_polish(r, a, b, [&](Scalar t) {
      if (detail::on_grid(p.grid(), t)) return std::pair<Scalar, Scalar>{barycentric_eval(p, t), Scalar(0)};
      return barycentric_value_and_slope(p, t);
    });
  }
  return detail::sort_unique(std::move(raw), Scalar(opt.dedup_tol));
}

/// The derivative of p sampled on p's own grid.
template <typename Scalar>
Interpolant<Scalar> derivative(const Interpolant<Scalar>& p) {
  const Vec<Scalar> dc = chebyshev_derivative(chebyshev_coefficients(p));
  Vec<Scalar> v(p.grid().size());
  for (Index i = 0; i < v.size(); ++i) v(i) = clenshaw(dc, p.grid()[i]);
  return Interpolant<Scalar>(p.grid(), std::move(v));
}

/// Local minimizers of p on [a, b]: interior critical points with positive
/// curvature, plus the endpoints where p does not decrease into the interval.
template <typename Scalar>
std::vector<Scalar> local_minima(const Interpolant<Scalar>& p, Scalar a = Scalar(-1), Scalar b = Scalar(1),
                                 const RootOptions& opt = {}) {
  const Vec<Scalar> c1 = chebyshev_derivative(chebyshev_coefficients(p));
  const Vec<Scalar> c2 = chebyshev_derivative(c1);
  std::vector<Scalar> out;
  if (c1.cwiseAbs().maxCoeff() == Scalar(0)) return {a, b};
  std::vector<Scalar> crit = chebyshev_series_roots(c1, a, b, opt);
  for (Scalar r : crit) {
    r = std::clamp(r, a, b);
    r = detail::newton_polish(r, a, b, [&](Scalar t) { return std::pair<Scalar, Scalar>{clenshaw(c1, t), clenshaw(c2, t)}; });
    if (r > a && r < b && clenshaw(c2, r) > Scalar(0)) out.push_back(r);
  }
  if (clenshaw(c1, a) >= Scalar(0)) out.push_back(a);
  if (clenshaw(c1, b) <= Scalar(0)) out.push_back(b);
  return detail::sort_unique(std::move(out), Scalar(opt.dedup_tol));
}

}  // namespace sosinterp::cheb
