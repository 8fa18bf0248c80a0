#pragma once

#include <cmath>
#include <numbers>

#include "sosinterp/chebkit/interpolant.hpp"

namespace sosinterp::cheb {

template <typename Scalar = double>
struct QuadratureWeights {
  Vec<Scalar> w;
  InterpolationGrid<Scalar> grid;

  /// Sum of w_l * values_l.
  Scalar integrate(const Vec<Scalar>& values) const {
    if (values.size() != w.size()) throw InvalidArgument("values do not match quadrature size");
    return w.dot(values);
  }
};

/// Integral of T_j over [-1, 1].
template <typename Scalar>
Scalar chebyshev_moment(Index j) {
  if (j % 2 != 0) return Scalar(0);
  return Scalar(2) / Scalar(1 - j * j);
}

/// w_l = integral of the l-th Lagrange basis polynomial, via Chebyshev moments.
/// Cheb2 gives Clenshaw-Curtis, Cheb1 gives Fejer's first rule.
template <typename Scalar>
QuadratureWeights<Scalar> clenshaw_curtis_weights(const InterpolationGrid<Scalar>& grid) {
  if (!grid.is_chebyshev()) throw InvalidArgument("quadrature weights need a Chebyshev grid");
  const Index np = grid.size();
  const Scalar pi = std::numbers::pi_v<Scalar>;
  Vec<Scalar> w(np);
  if (np == 1) {
    w(0) = Scalar(2);
    return {w, grid};
  }
  if (grid.kind() == GridKind::Cheb2) {
    const Index n = np - 1;
    for (Index l = 0; l <= n; ++l) {
      Scalar s = Scalar(0.5) * chebyshev_moment<Scalar>(0);
      for (Index j = 2; j < n; j += 2)
        s += chebyshev_moment<Scalar>(j) * std::cos(pi * Scalar((j * l) % (2 * n)) / Scalar(n));
      if (n % 2 == 0) s += Scalar(0.5) * chebyshev_moment<Scalar>(n) * ((l % 2 == 0) ? Scalar(1) : Scalar(-1));
      const Scalar h = (l == 0 || l == n) ? Scalar(0.5) : Scalar(1);
      w(l) = Scalar(2) * h * s / Scalar(n);
    }
  } else {
    const Index N = np;
    for (Index l = 0; l < N; ++l) {
      Scalar s = Scalar(0.5) * chebyshev_moment<Scalar>(0);
      for (Index j = 2; j < N; j += 2)
        s += chebyshev_moment<Scalar>(j) * std::cos(pi * Scalar((j * (2 * l + 1)) % (4 * N)) / Scalar(2 * N));
      w(l) = Scalar(2) * s / Scalar(N);
    }
  }
  return {w, grid};
}

template <typename Scalar>
Scalar integrate(const Interpolant<Scalar>& p) {
  return clenshaw_curtis_weights(p.grid()).integrate(p.values());
}

}  // namespace sosinterp::cheb
