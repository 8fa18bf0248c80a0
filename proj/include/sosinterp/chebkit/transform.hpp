#pragma once

#include <Eigen/QR>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "sosinterp/chebkit/interpolant.hpp"

namespace sosinterp::cheb {

/// Grids up to this many points use the explicit orthogonality sums.
inline constexpr Index kDirectTransformMaxPoints = 65;

/// Chebyshev coefficients by explicit discrete-orthogonality sums, O(n^2).
template <typename Scalar>
Vec<Scalar> values_to_coeffs_direct(const InterpolationGrid<Scalar>& grid, const Vec<Scalar>& values) {
  const Index np = grid.size();
  if (values.size() != np) throw InvalidArgument("values do not match grid size");
  const Scalar pi = std::numbers::pi_v<Scalar>;
  Vec<Scalar> c = Vec<Scalar>::Zero(np);
  if (np == 1) {
    c(0) = values(0);
    return c;
  }
  switch (grid.kind()) {
    case GridKind::Cheb2: {
      const Index n = np - 1;
      for (Index j = 0; j <= n; ++j) {
        Scalar s(0);
        for (Index l = 0; l <= n; ++l) {
          const Scalar h = (l == 0 || l == n) ? Scalar(0.5) : Scalar(1);
          // reduce j*l mod 2n before scaling keeps the cosine argument small
          s += h * values(l) * std::cos(pi * Scalar((j * l) % (2 * n)) / Scalar(n));
        }
        c(j) = Scalar(2) * s / Scalar(n);
      }
      c(0) *= Scalar(0.5);
      c(n) *= Scalar(0.5);
      return c;
    }
    case GridKind::Cheb1: {
      const Index N = np;
      for (Index j = 0; j < N; ++j) {
        Scalar s(0);
        for (Index l = 0; l < N; ++l)
          s += values(l) * std::cos(pi * Scalar((j * (2 * l + 1)) % (4 * N)) / Scalar(2 * N));
        c(j) = Scalar(2) * s / Scalar(N);
      }
      c(0) *= Scalar(0.5);
      return c;
    }
    case GridKind::General: {
      const Mat<Scalar> V = chebyshev_T_values(np - 1, grid.points()).transpose();
      return V.colPivHouseholderQr().solve(values);
    }
  }
  return c;
}

/// Chebyshev coefficients through a length-2N FFT of the mirrored samples.
template <typename Scalar>
Vec<Scalar> values_to_coeffs_fft(const InterpolationGrid<Scalar>& grid, const Vec<Scalar>& values) {
  const Index np = grid.size();
  if (values.size() != np) throw InvalidArgument("values do not match grid size");
  if (!grid.is_chebyshev()) return values_to_coeffs_direct(grid, values);
  if (np == 1) return values;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  Eigen::FFT<Scalar> fft;
  std::vector<Scalar> ext;
  std::vector<std::complex<Scalar>> spec;
  Vec<Scalar> c(np);
  if (grid.kind() == GridKind::Cheb2) {
    const Index n = np - 1;
    ext.resize(2 * n);
    for (Index l = 0; l <= n; ++l) ext[l] = values(l);
    for (Index l = 1; l < n; ++l) ext[2 * n - l] = values(l);
    fft.fwd(spec, ext);
    for (Index j = 0; j <= n; ++j) c(j) = spec[j].real() / Scalar(n);
    c(0) *= Scalar(0.5);
    c(n) *= Scalar(0.5);
  } else {
    const Index N = np;
    ext.resize(2 * N);
    for (Index l = 0; l < N; ++l) {
      ext[l] = values(l);
      ext[2 * N - 1 - l] = values(l);
    }
    fft.fwd(spec, ext);
    for (Index j = 0; j < N; ++j) {
      const std::complex<Scalar> tw = std::polar(Scalar(1), -pi * Scalar(j) / Scalar(2 * N));
      c(j) = (spec[j] * tw).real() / Scalar(N);
    }
    c(0) *= Scalar(0.5);
  }
  return c;
}

/// Values -> Chebyshev coefficients; direct sums for small grids, FFT above.
template <typename Scalar>
Vec<Scalar> values_to_coeffs(const InterpolationGrid<Scalar>& grid, const Vec<Scalar>& values) {
  if (grid.size() <= kDirectTransformMaxPoints) return values_to_coeffs_direct(grid, values);
  return values_to_coeffs_fft(grid, values);
}

template <typename Scalar>
Vec<Scalar> chebyshev_coefficients(const Interpolant<Scalar>& p) {
  return values_to_coeffs(p.grid(), p.values());
}

/// Clenshaw evaluation of sum_j c_j T_j(t).
template <typename Scalar>
Scalar clenshaw(const Vec<Scalar>& c, Scalar t) {
  Scalar b1(0), b2(0);
  for (Index j = c.size() - 1; j >= 1; --j) {
    const Scalar b0 = c(j) + Scalar(2) * t * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return (c.size() ? c(0) : Scalar(0)) + t * b1 - b2;
}

/// Coefficients of the derivative series (one degree lower).
template <typename Scalar>
Vec<Scalar> chebyshev_derivative(const Vec<Scalar>& c) {
  const Index n = c.size() - 1;
  if (n <= 0) return Vec<Scalar>::Zero(1);
  // d_k = d_{k+2} + 2(k+1) c_{k+1}, with d_n = d_{n+1} = 0 and d_0 halved
  Vec<Scalar> d = Vec<Scalar>::Zero(n + 2);
  for (Index k = n - 1; k >= 0; --k) d(k) = d(k + 2) + Scalar(2 * (k + 1)) * c(k + 1);
  d(0) *= Scalar(0.5);
  return d.head(n).eval();
}

/// Number of leading coefficients to keep: one past the last |c_j| above tol*scale.
template <typename Scalar>
Index chopped_length(const Vec<Scalar>& c, Scalar tol, Scalar scale) {
  Index len = c.size();
  while (len > 1 && std::abs(c(len - 1)) <= tol * scale) --len;
  return len;
}

}  // namespace sosinterp::cheb
