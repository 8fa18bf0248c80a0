#pragma once

#include <cmath>
#include <numbers>

#include "sosinterp/chebkit/grid.hpp"

namespace sosinterp::cheb {

/// Barycentric weights of a grid, normalized to max |w| = 1.
///
/// Chebyshev grids use closed forms; general grids use the product formula with
/// every factor scaled by 2 (the inverse capacity of [-1, 1]) so the products
/// neither overflow nor underflow for large n.
template <typename Scalar>
Vec<Scalar> barycentric_weights(const InterpolationGrid<Scalar>& grid) {
  const Index np = grid.size();
  Vec<Scalar> w(np);
  if (np == 1) {
    w(0) = Scalar(1);
    return w;
  }
  const Index n = np - 1;
  switch (grid.kind()) {
    case GridKind::Cheb2:
      for (Index l = 0; l <= n; ++l) w(l) = (l % 2 == 0) ? Scalar(1) : Scalar(-1);
      w(0) *= Scalar(0.5);
      w(n) *= Scalar(0.5);
      return w;
    case GridKind::Cheb1: {
      const Scalar pi = std::numbers::pi_v<Scalar>;
      for (Index l = 0; l <= n; ++l) {
        const Scalar s = std::sin(Scalar(2 * l + 1) * pi / Scalar(2 * n + 2));
        w(l) = (l % 2 == 0) ? s : -s;
      }
      return w / w.cwiseAbs().maxCoeff();
    }
    case GridKind::General: {
      const auto& t = grid.points();
      for (Index j = 0; j <= n; ++j) {
        Scalar prod(1);
        for (Index k = 0; k <= n; ++k)
          if (k != j) prod *= Scalar(2) * (t(j) - t(k));
        w(j) = Scalar(1) / prod;
      }
      return w / w.cwiseAbs().maxCoeff();
    }
  }
  return w;
}

/// A polynomial of degree <= n stored as its values at an (n+1)-point grid.
template <typename Scalar = double>
class Interpolant {
 public:
  using Vector = Vec<Scalar>;
  using Grid = InterpolationGrid<Scalar>;

  Interpolant() = default;

  Interpolant(Grid grid, Vector values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw InvalidArgument("interpolant values do not match grid size");
    weights_ = cheb::barycentric_weights(grid_);
  }

  template <typename F>
  static Interpolant from_function(Grid grid, F&& f) {
    Vector v(grid.size());
    for (Index i = 0; i < grid.size(); ++i) v(i) = f(grid[i]);
    return Interpolant(std::move(grid), std::move(v));
  }

  const Grid& grid() const noexcept { return grid_; }
  const Vector& values() const noexcept { return values_; }
  const Vector& barycentric_weights() const noexcept { return weights_; }
  Index degree() const noexcept { return grid_.degree(); }

  Scalar operator()(Scalar t) const;

 private:
  Grid grid_;
  Vector values_;
  Vector weights_;
};

/// First-form (modified Lagrange) evaluation, stable off [-1, 1] where the
/// second form overflows. Node factors are scaled by 2 as in the weights.
template <typename Scalar>
Scalar lagrange_first_form_eval(const Interpolant<Scalar>& p, Scalar t) {
  const auto& x = p.grid().points();
  const auto& w = p.barycentric_weights();
  const auto& f = p.values();
  // normalized weights are C times the raw 1 / prod 2(x_j - x_k); recover C from j = 0
  Scalar raw0(1);
  for (Index k = 1; k < x.size(); ++k) raw0 *= Scalar(2) * (x(0) - x(k));
  const Scalar C = w(0) * raw0;
  Scalar ell(1), sum(0);
  for (Index j = 0; j < x.size(); ++j) {
    const Scalar d = t - x(j);
    if (d == Scalar(0)) return f(j);
    ell *= Scalar(2) * d;
    sum += w(j) * f(j) / d;
  }
  return ell * sum / (Scalar(2) * C);
}

/// Barycentric evaluation; returns the stored value at grid points. Uses the
/// second form on [-1, 1] and the first form outside.
template <typename Scalar>
Scalar barycentric_eval(const Interpolant<Scalar>& p, Scalar t) {
  if (std::abs(t) > Scalar(1)) return lagrange_first_form_eval(p, t);
  const auto& x = p.grid().points();
  const auto& w = p.barycentric_weights();
  const auto& f = p.values();
  Scalar num(0), den(0);
  for (Index j = 0; j < x.size(); ++j) {
    const Scalar d = t - x(j);
    if (d == Scalar(0)) return f(j);
    const Scalar c = w(j) / d;
    num += c * f(j);
    den += c;
  }
  return num / den;
}

template <typename Scalar>
Scalar Interpolant<Scalar>::operator()(Scalar t) const {
  return barycentric_eval(*this, t);
}

template <typename Scalar, typename Derived>
Vec<Scalar> evaluate(const Interpolant<Scalar>& p, const Eigen::MatrixBase<Derived>& ts) {
  Vec<Scalar> out(ts.size());
  for (Index i = 0; i < ts.size(); ++i) out(i) = barycentric_eval(p, Scalar(ts(i)));
  return out;
}

/// Linear map from values on `source` to values on `target` of the same polynomial.
template <typename Scalar = double>
struct UpsampleMatrix {
  Mat<Scalar> B;
  InterpolationGrid<Scalar> source;
  InterpolationGrid<Scalar> target;
  /// Set when the source grid is not Chebyshev-type; the map may then amplify
  /// perturbations badly and should not be trusted for high degrees.
  bool ill_conditioned_source = false;
};

/// Row j of B holds the Lagrange basis L_0..L_n of `source` evaluated at target_j.
template <typename Scalar>
UpsampleMatrix<Scalar> upsample_matrix(const InterpolationGrid<Scalar>& source,
                                       const InterpolationGrid<Scalar>& target) {
  const Index n1 = source.size();
  const Index N1 = target.size();
  const auto w = barycentric_weights(source);
  const auto& x = source.points();
  Mat<Scalar> B(N1, n1);
  for (Index j = 0; j < N1; ++j) {
    const Scalar t = target[j];
    Index hit = -1;
    Scalar den(0);
    for (Index l = 0; l < n1; ++l) {
      const Scalar d = t - x(l);
      if (d == Scalar(0)) {
        hit = l;
        break;
      }
      B(j, l) = w(l) / d;
      den += B(j, l);
    }
    if (hit >= 0) {
      B.row(j).setZero();
      B(j, hit) = Scalar(1);
    } else {
      B.row(j) /= den;
    }
  }
  return UpsampleMatrix<Scalar>{std::move(B), source, target, !source.is_chebyshev()};
}

/// Re-express p on another grid (exact when target.degree() >= p.degree()).
template <typename Scalar>
Interpolant<Scalar> resample(const Interpolant<Scalar>& p, const InterpolationGrid<Scalar>& target) {
  return Interpolant<Scalar>(target, evaluate(p, target.points()));
}

}  // namespace sosinterp::cheb
