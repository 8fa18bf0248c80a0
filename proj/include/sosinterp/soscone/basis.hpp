#pragma once

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>
#include <optional>
#include <type_traits>
#include <vector>

#include "sosinterp/chebkit/grid.hpp"

namespace sosinterp::sos {

using cheb::GridKind;
using cheb::Index;
using cheb::InterpolationGrid;
using cheb::Mat;
using cheb::Vec;

/// Lukacs weights that multiply a squared polynomial in an interval certificate.
enum class WeightKind { One, OnePlusT, OneMinusT, OneMinusTSquared };

inline const char* to_string(WeightKind w) {
  switch (w) {
    case WeightKind::One: return "1";
    case WeightKind::OnePlusT: return "1+t";
    case WeightKind::OneMinusT: return "1-t";
    case WeightKind::OneMinusTSquared: return "1-t^2";
  }
  return "?";
}

template <typename Scalar>
Scalar weight_value(WeightKind w, Scalar t) {
  switch (w) {
    case WeightKind::One: return Scalar(1);
    case WeightKind::OnePlusT: return Scalar(1) + t;
    case WeightKind::OneMinusT: return Scalar(1) - t;
    case WeightKind::OneMinusTSquared: return (Scalar(1) - t) * (Scalar(1) + t);
  }
  return Scalar(1);
}

/// Basis values at a grid, row l = sqrt(w(t_l)) * (p_0(t_l), ..., p_k(t_l)).
template <typename Scalar = double>
struct BasisMatrix {
  Mat<Scalar> P;
  InterpolationGrid<Scalar> grid;
  WeightKind weight = WeightKind::One;

  Index rows() const noexcept { return P.rows(); }
  Index cols() const noexcept { return P.cols(); }
  /// Degree k of the basis polynomials.
  Index degree() const noexcept { return P.cols() - 1; }
};

/// max |(P^T P - I)_ij|.
template <typename Scalar>
Scalar gram_defect(const Mat<Scalar>& P) {
  Mat<Scalar> G = P.transpose() * P;
  G.diagonal().array() -= Scalar(1);
  return G.cwiseAbs().maxCoeff();
}

namespace detail {

inline constexpr double kRankTol = 1e-10;

/// sin or cos of pi * num / den with num reduced modulo 2 den first.
template <typename Scalar>
Scalar cos_pi_ratio(Index num, Index den) {
  num %= 2 * den;
  return std::cos(std::numbers::pi_v<Scalar> * Scalar(num) / Scalar(den));
}
template <typename Scalar>
Scalar sin_pi_ratio(Index num, Index den) {
  num %= 2 * den;
  return std::sin(std::numbers::pi_v<Scalar> * Scalar(num) / Scalar(den));
}

/// Nudge entries of the rounded unit column out (length n) by one ulp, largest
/// magnitudes first with ties by row, while that brings the squared norm
/// closer to 1 in Wide arithmetic. `order` is scratch space.
template <typename Scalar, typename Wide>
void nudge_unit_column(Scalar* out, Index n, std::vector<Index>& order) {
  if constexpr (std::is_same_v<Scalar, Wide>) return;
  Wide err = -1;
  Scalar peak(0);
  for (Index l = 0; l < n; ++l) {
    err += Wide(out[l]) * Wide(out[l]);
    peak = std::max(peak, std::abs(out[l]));
  }
  auto before = [&](Index a, Index b) {
    const Scalar x = std::abs(out[a]), y = std::abs(out[b]);
    return x > y || (x == y && a < b);
  };
  // the visit usually stops within the few entries near the peak magnitude;
  // sorting those is a prefix of the full order
  const Scalar cut = peak * Scalar(0.999);
  order.clear();
  for (Index l = 0; l < n; ++l)
    if (std::abs(out[l]) >= cut) order.push_back(l);
  std::sort(order.begin(), order.end(), before);
  bool complete = std::ptrdiff_t(order.size()) == n;
  for (std::size_t pos = 0;; ++pos) {
    if (pos == order.size()) {
      if (complete) break;
      const std::size_t head = order.size();
      for (Index l = 0; l < n; ++l)
        if (std::abs(out[l]) < cut) order.push_back(l);
      std::sort(order.begin() + std::ptrdiff_t(head), order.end(), before);
      complete = true;
      if (pos == order.size()) break;
    }
    const Index l = order[pos];
    const Scalar q = out[l];
    if (q == Scalar(0)) break;
    const Scalar moved = std::nextafter(q, err > 0 ? Scalar(0) : std::copysign(std::numeric_limits<Scalar>::infinity(), q));
    const Wide next = err + Wide(moved) * Wide(moved) - Wide(q) * Wide(q);
    if (std::abs(next) >= std::abs(err)) break;
    out[l] = moved;
    err = next;
  }
}

}  // namespace detail

/// Thin QR of diag(sqrt(w)) * values with diag(R) > 0; returns Q.
///
/// Throws RankDeficiencyError when |R_ii| < 1e-10 * max_j |R_jj|.
template <typename Scalar>
Mat<Scalar> orthonormal_columns(const Mat<Scalar>& values, const std::optional<Vec<Scalar>>& weights = std::nullopt) {
  Mat<Scalar> A = values;
  if (weights) {
    if (weights->size() != values.rows()) throw InvalidArgument("weights do not match the number of points");
    for (Index l = 0; l < A.rows(); ++l) {
      if (!((*weights)(l) >= Scalar(0))) throw InvalidArgument("weights must be nonnegative");
      A.row(l) *= std::sqrt((*weights)(l));
    }
  }
  const Index m = A.rows(), k = A.cols();
  if (k > m) throw RankDeficiencyError(m, 0.0);
  Eigen::HouseholderQR<Mat<Scalar>> qr(A);
  const Mat<Scalar>& R = qr.matrixQR();
  Scalar rmax(0);
  for (Index i = 0; i < k; ++i) rmax = std::max(rmax, std::abs(R(i, i)));
  for (Index i = 0; i < k; ++i) {
    const Scalar ratio = rmax > Scalar(0) ? std::abs(R(i, i)) / rmax : Scalar(0);
    if (ratio < Scalar(detail::kRankTol)) throw RankDeficiencyError(i, double(ratio));
  }
  Mat<Scalar> Q = qr.householderQ() * Mat<Scalar>::Identity(m, k);
  for (Index i = 0; i < k; ++i)
    if (R(i, i) < Scalar(0)) Q.col(i) *= Scalar(-1);
  return Q;
}

/// QR-orthonormalized basis of the given point values, optionally weight-scaled.
template <typename Scalar>
BasisMatrix<Scalar> orthonormalize_at_points(const Mat<Scalar>& values,
                                             const std::optional<Vec<Scalar>>& weights = std::nullopt) {
  return {orthonormal_columns(values, weights), InterpolationGrid<Scalar>{}, WeightKind::One};
}

/// QR-orthonormalized Chebyshev basis of degree k on a grid under a Lukacs weight.
template <typename Scalar>
BasisMatrix<Scalar> orthonormalize_at_points(const InterpolationGrid<Scalar>& grid, Index k, WeightKind weight) {
  if (k < 0) throw InvalidArgument("basis degree must be nonnegative");
  const Mat<Scalar> T = cheb::chebyshev_T_values(k, grid.points()).transpose();
  Vec<Scalar> w(grid.size());
  for (Index l = 0; l < grid.size(); ++l) w(l) = weight_value(weight, grid[l]);
  return {orthonormal_columns(T, std::optional<Vec<Scalar>>(w)), grid, weight};
}

/// Orthonormal basis of degree k on the first-kind grid `grid` (N points, N > k).
///
/// On first-kind points the weighted Chebyshev columns have a closed-form QR
/// factor: with theta_l = (l + 1/2) pi / N,
///   weight 1      : sqrt(1/N) T_0, sqrt(2/N) T_i
///   weight 1 + t  : sqrt(2/N) cos((i + 1/2) theta)
///   weight 1 - t  : sqrt(2/N) sin((i + 1/2) theta)
///   weight 1 - t^2: sqrt(2/N) sin((i + 1) theta)
/// which is what Householder QR of diag(sqrt(w)) T returns, up to rounding.
/// Entries are formed in extended precision, rounded once, then ulp-nudged so
/// each rounded column norm is as close to 1 as the nudge can bring it.
template <typename Scalar>
BasisMatrix<Scalar> first_kind_basis(const InterpolationGrid<Scalar>& grid, Index k, WeightKind weight) {
  if (grid.kind() != GridKind::Cheb1) throw InvalidArgument("closed-form basis needs a first-kind grid");
  const Index N = grid.size();
  if (k < 0) throw InvalidArgument("basis degree must be nonnegative");
  const Index max_k = weight == WeightKind::One ? N - 1 : (weight == WeightKind::OneMinusTSquared ? N - 2 : N - 1);
  if (k > max_k) throw RankDeficiencyError(max_k + 1, 0.0);
  // entries in extended precision, columns renormalized there, then rounded once
  using Wide = std::conditional_t<(sizeof(Scalar) < sizeof(long double)), long double, Scalar>;
  // every entry is cos(pi j / (4N)) for some 0 <= j < 8N; one table covers them all
  const Index period = 8 * N, quarter = 2 * N;
  std::vector<Wide> cos_table(static_cast<std::size_t>(period));
  for (Index j = 0; j <= quarter; ++j) cos_table[std::size_t(j)] = detail::cos_pi_ratio<Wide>(j, 4 * N);
  for (Index j = quarter + 1; j <= 2 * quarter; ++j) cos_table[std::size_t(j)] = -cos_table[std::size_t(2 * quarter - j)];
  for (Index j = 2 * quarter + 1; j < period; ++j) cos_table[std::size_t(j)] = cos_table[std::size_t(period - j)];
  // column i holds cos(pi c (2l+1) / (4N)), or sin for the 1 - t weights
  Index shift = 0;
  switch (weight) {
    case WeightKind::One:
    case WeightKind::OnePlusT: shift = 0; break;
    case WeightKind::OneMinusT:
    case WeightKind::OneMinusTSquared: shift = 2 * N; break;  // sin x = cos(x - pi/2)
  }
  auto multiplier = [&](Index i) -> Index {
    switch (weight) {
      case WeightKind::One: return 2 * i;  // T_i(t_l) = cos(i (2l+1) pi / (2N))
      case WeightKind::OnePlusT:
      case WeightKind::OneMinusT: return 2 * i + 1;
      case WeightKind::OneMinusTSquared: return 2 * (i + 1);
    }
    return 0;
  };
  // discrete orthogonality: every column has squared norm N / 2, except T_0 with N
  const Wide half_scale = std::sqrt(Wide(2) / Wide(N)), full_scale = std::sqrt(Wide(1) / Wide(N));
  Mat<Scalar> P(N, k + 1);
  std::vector<Index> order;
  for (Index i = 0; i <= k; ++i) {
    const Index c = multiplier(i) % period;
    const Index step = (2 * c) % period;
    const Wide scale = c == 0 ? full_scale : half_scale;
    Index j = (c - shift % period + period) % period;
    Scalar* out = P.col(i).data();
    for (Index l = 0; l < N; ++l) {
      out[l] = Scalar(cos_table[std::size_t(j)] * scale);
      j += step;
      if (j >= period) j -= period;
    }
    detail::nudge_unit_column<Scalar, Wide>(out, N, order);
  }
  return {std::move(P), grid, weight};
}

/// Orthonormal basis p_0 = sqrt(1/(2k+1)) T_0, p_i = sqrt(2/(2k+1)) T_i on Cheb1(2k).
template <typename Scalar = double>
BasisMatrix<Scalar> scaled_chebyshev_basis(Index k) {
  if (k < 0) throw InvalidArgument("scaled_chebyshev_basis needs k >= 0");
  return first_kind_basis(InterpolationGrid<Scalar>::first_kind(2 * k), k, WeightKind::One);
}

/// Weighted orthonormal basis on any grid: closed form on first-kind grids, QR otherwise.
template <typename Scalar>
BasisMatrix<Scalar> weighted_basis(const InterpolationGrid<Scalar>& grid, Index k, WeightKind weight) {
  if (grid.kind() == GridKind::Cheb1) return first_kind_basis(grid, k, weight);
  return orthonormalize_at_points(grid, k, weight);
}

/// Y(y) = P^T diag(y) P.
template <typename Scalar>
Mat<Scalar> dual_matrix(const Vec<Scalar>& y, const BasisMatrix<Scalar>& basis) {
  if (y.size() != basis.rows()) throw InvalidArgument("dual vector does not match basis rows");
  return basis.P.transpose() * y.asDiagonal() * basis.P;
}

/// Unweighted basis polynomial values p_i(t_l) recovered from the weighted rows.
/// Rows where the weight vanishes are left at zero.
template <typename Scalar>
Mat<Scalar> unweighted_values(const BasisMatrix<Scalar>& basis) {
  Mat<Scalar> V = basis.P;
  for (Index l = 0; l < V.rows(); ++l) {
    const Scalar w = weight_value(basis.weight, basis.grid[l]);
    V.row(l) = w > Scalar(0) ? (V.row(l) / std::sqrt(w)).eval() : Vec<Scalar>::Zero(V.cols()).transpose().eval();
  }
  return V;
}

}  // namespace sosinterp::sos
