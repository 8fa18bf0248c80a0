#pragma once

#include <ostream>
#include <utility>
#include <vector>

#include "sosinterp/chebkit/interpolant.hpp"
#include "sosinterp/soscone/basis.hpp"

namespace sosinterp::sos {

/// Values f_l = A^(l) . X of a Lagrange cone, where A^(l) = P_l P_l^T.
template <typename Scalar>
Vec<Scalar> rank_one_apply(const Mat<Scalar>& P, const Mat<Scalar>& X) {
  if (X.rows() != P.cols() || X.cols() != P.cols()) throw InvalidArgument("certificate size does not match basis");
  return (P * X).cwiseProduct(P).rowwise().sum();
}

/// Interpolant cone of SOS polynomials through the rows of one BasisMatrix.
/// f is the value vector of a member iff f_l = A^(l) . X for some X >= 0.
template <typename Scalar = double>
class LagrangeSosCone {
 public:
  LagrangeSosCone() = default;
  explicit LagrangeSosCone(BasisMatrix<Scalar> basis) : basis_(std::move(basis)) {}

  const BasisMatrix<Scalar>& basis() const noexcept { return basis_; }
  Index num_constraints() const noexcept { return basis_.rows(); }
  Index block_size() const noexcept { return basis_.cols(); }
  /// Row l of P; A^(l) is its outer product with itself.
  auto factor(Index l) const { return basis_.P.row(l).transpose(); }

  Mat<Scalar> constraint_matrix(Index l) const { return factor(l) * factor(l).transpose(); }
  Vec<Scalar> apply(const Mat<Scalar>& X) const { return rank_one_apply(basis_.P, X); }

 private:
  BasisMatrix<Scalar> basis_;
};

/// SOS_{2k} cone on Cheb1(2k) with the scaled Chebyshev basis.
template <typename Scalar = double>
LagrangeSosCone<Scalar> lagrange_sos_cone(Index k) {
  return LagrangeSosCone<Scalar>(scaled_chebyshev_basis<Scalar>(k));
}

/// r-th derivative of T_0..T_max at t; row r, column i.
template <typename Scalar>
Mat<Scalar> chebyshev_T_derivatives(Index max_degree, Index max_order, Scalar t) {
  // differentiate T_i = 2t T_{i-1} - T_{i-2} r times:
  // T_i^(r) = 2t T_{i-1}^(r) + 2r T_{i-1}^(r-1) - T_{i-2}^(r)
  Mat<Scalar> D = Mat<Scalar>::Zero(max_order + 1, max_degree + 1);
  for (Index r = 0; r <= max_order; ++r) {
    if (r == 0) D(0, 0) = Scalar(1);
    if (max_degree >= 1) D(r, 1) = (r == 0) ? t : (r == 1 ? Scalar(1) : Scalar(0));
    for (Index i = 2; i <= max_degree; ++i) {
      D(r, i) = Scalar(2) * t * D(r, i - 1) - D(r, i - 2);
      if (r > 0) D(r, i) += Scalar(2 * r) * D(r - 1, i - 1);
    }
  }
  return D;
}

/// Hermite interpolant cone: q^(m)(t_l) = A^(l,m) . X with q in SOS_{2d}.
template <typename Scalar = double>
class HermiteSosCone {
 public:
  struct Constraint {
    Index point;
    Index order;
    Mat<Scalar> A;
  };

  HermiteSosCone(Vec<Scalar> points, std::vector<Index> multiplicities)
      : points_(std::move(points)), mult_(std::move(multiplicities)) {
    if (points_.size() == 0 || Index(mult_.size()) != points_.size())
      throw InvalidArgument("hermite cone needs one multiplicity per point");
    Index total = 0;
    for (Index l = 0; l < points_.size(); ++l) {
      if (mult_[l] < 0) throw InvalidArgument("multiplicities must be nonnegative");
      for (Index j = 0; j < l; ++j)
        if (points_(j) == points_(l)) throw InvalidArgument("hermite points must be distinct");
      total += mult_[l] + 1;
    }
    if (total % 2 == 0) throw InvalidArgument("sum of (multiplicity + 1) must be odd");
    d_ = (total - 1) / 2;
    // degree-d scaled Chebyshev basis: p_0 = sqrt(1/(2d+1)) T_0, p_i = sqrt(2/(2d+1)) T_i
    Vec<Scalar> scale = Vec<Scalar>::Constant(d_ + 1, std::sqrt(Scalar(2) / Scalar(2 * d_ + 1)));
    scale(0) = std::sqrt(Scalar(1) / Scalar(2 * d_ + 1));
    for (Index l = 0; l < points_.size(); ++l) {
      const Index m = mult_[l];
      const Mat<Scalar> D = chebyshev_T_derivatives(d_, m, points_(l)) * scale.asDiagonal();
      for (Index order = 0; order <= m; ++order) {
        Mat<Scalar> A = Mat<Scalar>::Zero(d_ + 1, d_ + 1);
        Scalar binom(1);
        for (Index r = 0; r <= order; ++r) {
          A += binom * D.row(r).transpose() * D.row(order - r);
          binom = binom * Scalar(order - r) / Scalar(r + 1);
        }
        constraints_.push_back({l, order, Scalar(0.5) * (A + A.transpose())});
      }
    }
  }

  const Vec<Scalar>& points() const noexcept { return points_; }
  const std::vector<Index>& multiplicities() const noexcept { return mult_; }
  Index d() const noexcept { return d_; }
  Index block_size() const noexcept { return d_ + 1; }
  const std::vector<Constraint>& constraints() const noexcept { return constraints_; }

  /// A^(l,m) for point index l and derivative order m.
  const Mat<Scalar>& matrix(Index point, Index order) const {
    for (const auto& c : constraints_)
      if (c.point == point && c.order == order) return c.A;
    throw InvalidArgument("no hermite constraint for that point and order");
  }

  /// A^(l,m) . X in constraint order.
  Vec<Scalar> apply(const Mat<Scalar>& X) const {
    Vec<Scalar> f(constraints_.size());
    for (std::size_t c = 0; c < constraints_.size(); ++c) f(Index(c)) = constraints_[c].A.cwiseProduct(X).sum();
    return f;
  }

 private:
  Vec<Scalar> points_;
  std::vector<Index> mult_;
  Index d_ = 0;
  std::vector<Constraint> constraints_;
};

template <typename Scalar = double>
HermiteSosCone<Scalar> hermite_sos_cone(Vec<Scalar> points, std::vector<Index> multiplicities) {
  return HermiteSosCone<Scalar>(std::move(points), std::move(multiplicities));
}

/// Polynomials of degree n nonnegative on [-1, 1], as weighted SOS members on one grid:
///   n = 2k-1: p = (1+t) q + (1-t) r,     q, r in SOS_{2k-2}
///   n = 2k:   p = (1-t^2) q + s,         q in SOS_{2k-2}, s in SOS_{2k}
///   n = 0:    p = s, s a nonnegative constant
template <typename Scalar = double>
class IntervalNonnegCone {
 public:
  enum class Parity { Odd, Even };

  IntervalNonnegCone() = default;
  explicit IntervalNonnegCone(InterpolationGrid<Scalar> grid) : grid_(std::move(grid)) {
    const Index n = grid_.degree();
    if (n == 0) {
      members_.emplace_back(weighted_basis(grid_, 0, WeightKind::One));
    } else if (n % 2 == 1) {
      const Index k = (n + 1) / 2;
      members_.emplace_back(weighted_basis(grid_, k - 1, WeightKind::OnePlusT));
      members_.emplace_back(weighted_basis(grid_, k - 1, WeightKind::OneMinusT));
    } else {
      const Index k = n / 2;
      members_.emplace_back(weighted_basis(grid_, k - 1, WeightKind::OneMinusTSquared));
      members_.emplace_back(weighted_basis(grid_, k, WeightKind::One));
    }
  }

  const InterpolationGrid<Scalar>& grid() const noexcept { return grid_; }
  Index degree() const noexcept { return grid_.degree(); }
  Parity parity() const noexcept { return degree() % 2 == 1 ? Parity::Odd : Parity::Even; }
  const std::vector<LagrangeSosCone<Scalar>>& members() const noexcept { return members_; }

  /// Value vector of sum_m A_m^(l) . X_m.
  Vec<Scalar> apply(const std::vector<Mat<Scalar>>& X) const {
    if (X.size() != members_.size()) throw InvalidArgument("one certificate block per member expected");
    Vec<Scalar> f = Vec<Scalar>::Zero(grid_.size());
    for (std::size_t m = 0; m < members_.size(); ++m) f += members_[m].apply(X[m]);
    return f;
  }

  cheb::Interpolant<Scalar> polynomial(const std::vector<Mat<Scalar>>& X) const {
    return cheb::Interpolant<Scalar>(grid_, apply(X));
  }

 private:
  InterpolationGrid<Scalar> grid_;
  std::vector<LagrangeSosCone<Scalar>> members_;
};

/// Interval cone of degree n on Cheb1(n) with closed-form orthonormal members.
template <typename Scalar = double>
IntervalNonnegCone<Scalar> interval_nonneg_cone(Index n) {
  if (n < 0) throw InvalidArgument("interval cone needs n >= 0");
  return IntervalNonnegCone<Scalar>(InterpolationGrid<Scalar>::first_kind(n));
}

/// Debug dump of the dense constraint matrices: one "l,i,j,value" line per
/// upper-triangle entry.
template <typename Scalar>
void write_constraint_csv(std::ostream& os, const LagrangeSosCone<Scalar>& cone) {
  os << "l,i,j,value\n";
  for (Index l = 0; l < cone.num_constraints(); ++l) {
    const Mat<Scalar> A = cone.constraint_matrix(l);
    for (Index i = 0; i < A.rows(); ++i)
      for (Index j = i; j < A.cols(); ++j) os << l << ',' << i << ',' << j << ',' << A(i, j) << '\n';
  }
}

template <typename Scalar>
void write_constraint_csv(std::ostream& os, const HermiteSosCone<Scalar>& cone) {
  os << "l,m,i,j,value\n";
  for (const auto& c : cone.constraints())
    for (Index i = 0; i < c.A.rows(); ++i)
      for (Index j = i; j < c.A.cols(); ++j) os << c.point << ',' << c.order << ',' << i << ',' << j << ',' << c.A(i, j) << '\n';
}

}  // namespace sosinterp::sos
