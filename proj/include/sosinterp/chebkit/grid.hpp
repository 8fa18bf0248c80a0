#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <string>

#include "sosinterp/errors.hpp"

namespace sosinterp::cheb {

using Eigen::Index;

enum class GridKind { Cheb2, Cheb1, General };

inline const char* to_string(GridKind kind) {
  switch (kind) {
    case GridKind::Cheb2: return "cheb2";
    case GridKind::Cheb1: return "cheb1";
    case GridKind::General: return "general";
  }
  return "unknown";
}

inline GridKind grid_kind_from_string(const std::string& s) {
  if (s == "cheb2") return GridKind::Cheb2;
  if (s == "cheb1") return GridKind::Cheb1;
  if (s == "general") return GridKind::General;
  throw InvalidArgument("unknown grid kind '" + s + "'");
}

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Ordered, distinct interpolation points in [-1, 1], stored in descending order.
///
/// Chebyshev grids are built through the static factories; arbitrary point sets go
/// through general(), which validates ordering, distinctness and range.
template <typename Scalar = double>
class InterpolationGrid {
 public:
  using Vector = Vec<Scalar>;

  InterpolationGrid() = default;

  /// Second-kind points cos(l*pi/n), l = 0..n. Endpoints are exactly +-1.
  static InterpolationGrid second_kind(Index n) {
    if (n < 1) throw InvalidArgument("second-kind Chebyshev grid needs n >= 1");
    const Scalar pi = std::numbers::pi_v<Scalar>;
    Vector t(n + 1);
    // sin form keeps the grid exactly symmetric and hits 0 and +-1 exactly
    for (Index l = 0; l <= n; ++l) t(l) = std::sin(pi * Scalar(n - 2 * l) / Scalar(2 * n));
    return InterpolationGrid(GridKind::Cheb2, std::move(t));
  }

  /// First-kind points cos((l + 1/2)*pi/(n+1)), l = 0..n. No endpoints.
  static InterpolationGrid first_kind(Index n) {
    if (n < 0) throw InvalidArgument("first-kind Chebyshev grid needs n >= 0");
    const Scalar pi = std::numbers::pi_v<Scalar>;
    Vector t(n + 1);
    for (Index l = 0; l <= n; ++l) t(l) = std::sin(pi * Scalar(n - 2 * l) / Scalar(2 * (n + 1)));
    return InterpolationGrid(GridKind::Cheb1, std::move(t));
  }

  static InterpolationGrid general(Vector points) {
    if (points.size() == 0) throw InvalidArgument("grid needs at least one point");
    for (Index i = 0; i < points.size(); ++i) {
      if (!(points(i) >= Scalar(-1) && points(i) <= Scalar(1)))
        throw InvalidArgument("grid point " + std::to_string(i) + " outside [-1, 1]");
      if (i > 0 && !(points(i) < points(i - 1)))
        throw InvalidArgument("grid points must be distinct and in descending order");
    }
    return InterpolationGrid(GridKind::General, std::move(points));
  }

  GridKind kind() const noexcept { return kind_; }
  bool is_chebyshev() const noexcept { return kind_ != GridKind::General; }
  Index size() const noexcept { return points_.size(); }
  /// Polynomial degree n carried by the grid (size - 1).
  Index degree() const noexcept { return points_.size() - 1; }
  const Vector& points() const noexcept { return points_; }
  Scalar operator[](Index i) const { return points_(i); }

  friend bool operator==(const InterpolationGrid& a, const InterpolationGrid& b) {
    return a.kind_ == b.kind_ && a.points_.size() == b.points_.size() && a.points_ == b.points_;
  }

 private:
  InterpolationGrid(GridKind kind, Vector points) : kind_(kind), points_(std::move(points)) {}

  GridKind kind_ = GridKind::General;
  Vector points_;
};

template <typename Scalar = double>
InterpolationGrid<Scalar> cheb_points_second_kind(Index n) {
  return InterpolationGrid<Scalar>::second_kind(n);
}

template <typename Scalar = double>
InterpolationGrid<Scalar> cheb_points_first_kind(Index n) {
  return InterpolationGrid<Scalar>::first_kind(n);
}

/// Grid of the given kind and degree. General kind has no canonical points.
template <typename Scalar = double>
InterpolationGrid<Scalar> chebyshev_grid(GridKind kind, Index n) {
  switch (kind) {
    case GridKind::Cheb2: return InterpolationGrid<Scalar>::second_kind(n);
    case GridKind::Cheb1: return InterpolationGrid<Scalar>::first_kind(n);
    case GridKind::General: break;
  }
  throw InvalidArgument("general grids cannot be reconstructed from kind and degree");
}

/// T_0..T_max_degree at every point; row i holds T_i, column j the point j.
template <typename Derived>
Mat<typename Derived::Scalar> chebyshev_T_values(Index max_degree, const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  if (max_degree < 0) throw InvalidArgument("max_degree must be nonnegative");
  const Index np = points.size();
  Mat<Scalar> T(max_degree + 1, np);
  T.row(0).setOnes();
  if (max_degree >= 1) T.row(1) = points.transpose();
  for (Index i = 2; i <= max_degree; ++i)
    T.row(i) = Scalar(2) * T.row(1).cwiseProduct(T.row(i - 1)) - T.row(i - 2);
  return T;
}

/// Affine map of x in [a, b] onto [-1, 1].
template <typename Scalar>
Scalar to_unit_interval(Scalar x, Scalar a, Scalar b) {
  if (!(b > a)) throw InvalidArgument("interval must satisfy a < b");
  return (Scalar(2) * x - (a + b)) / (b - a);
}

/// Inverse of to_unit_interval.
template <typename Scalar>
Scalar from_unit_interval(Scalar t, Scalar a, Scalar b) {
  if (!(b > a)) throw InvalidArgument("interval must satisfy a < b");
  return Scalar(0.5) * ((b - a) * t + (a + b));
}

}  // namespace sosinterp::cheb
