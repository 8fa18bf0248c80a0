#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "sosinterp/chebkit/transform.hpp"

namespace sosinterp::cheb {

struct AdaptiveOptions {
  Index initial_n = 16;
  Index max_n = Index(1) << 15;
};

template <typename Scalar = double>
struct AdaptiveResult {
  Interpolant<Scalar> interpolant;
  /// max of the probe mismatch and the coefficient tail, relative to max|values|.
  Scalar residual;
};

/// Sample on Cheb2(n) for n = 16, 32, ... until the interpolant predicts fresh
/// samples at the interleaved Cheb1(n/2) points within tol and the last eighth of
/// its Chebyshev coefficients is below tol, both relative to max|values|.
/// The probe comparison never demands less than 16 ulps.
template <typename Scalar = double, typename F>
AdaptiveResult<Scalar> adaptive_interpolate(F&& sampler, Scalar tol, const AdaptiveOptions& opt = {}) {
  if (!(tol > Scalar(0))) throw InvalidArgument("adaptive tolerance must be positive");
  if (opt.initial_n < 1 || opt.max_n < opt.initial_n) throw InvalidArgument("bad adaptive grid-size range");
  Scalar last = std::numeric_limits<Scalar>::infinity();
  for (Index n = opt.initial_n; n <= opt.max_n; n *= 2) {
    auto p = Interpolant<Scalar>::from_function(InterpolationGrid<Scalar>::second_kind(n), sampler);
    const auto& v = p.values();
    if (!v.allFinite()) throw InvalidArgument("sampler returned a non-finite value at n = " + std::to_string(n));
    Scalar scale = v.cwiseAbs().maxCoeff();
    const auto probe = InterpolationGrid<Scalar>::first_kind(n / 2);
    Scalar mismatch(0);
    for (Index i = 0; i < probe.size(); ++i) {
      const Scalar fv = sampler(probe[i]);
      scale = std::max(scale, std::abs(fv));
      mismatch = std::max(mismatch, std::abs(barycentric_eval(p, probe[i]) - fv));
    }
    if (scale == Scalar(0)) return {std::move(p), Scalar(0)};
    const Vec<Scalar> c = chebyshev_coefficients(p);
    const Index tail = (n + 1 + 7) / 8;
    const Scalar tail_max = c.tail(tail).cwiseAbs().maxCoeff();
    last = std::max(mismatch, tail_max) / scale;
    // probe values carry sampler and evaluation rounding, so that check is floored
    const Scalar probe_tol = std::max(tol, Scalar(16) * std::numeric_limits<Scalar>::epsilon());
    if (mismatch <= probe_tol * scale && tail_max <= tol * scale) return {std::move(p), last};
  }
  throw ConvergenceError("adaptive interpolation did not reach tolerance by n = " + std::to_string(opt.max_n), double(last));
}

/// Degree after dropping trailing Chebyshev coefficients below tol * max|values|.
template <typename Scalar>
Index effective_degree(const Interpolant<Scalar>& p, Scalar tol) {
  const Scalar scale = p.values().cwiseAbs().maxCoeff();
  if (scale == Scalar(0)) return 0;
  return chopped_length(chebyshev_coefficients(p), tol, scale) - 1;
}

/// Smallest n >= k + 1 with 4V / (pi k (n - k)^k) <= tol.
inline Index error_bound_points(int k, double V, double tol) {
  if (k < 1) throw InvalidArgument("error_bound_points needs k >= 1");
  if (!(tol > 0)) throw InvalidArgument("error_bound_points needs tol > 0");
  if (!(V >= 0)) throw InvalidArgument("variation bound must be nonnegative");
  if (V == 0) return k + 1;
  const double x = std::pow(4.0 * V / (std::numbers::pi * k * tol), 1.0 / k);
  // relative slack absorbs rounding when x lands on an integer
  const double m = std::ceil(x * (1.0 - 1e-12));
  return std::max<Index>(k + 1, k + static_cast<Index>(m));
}

}  // namespace sosinterp::cheb
