#pragma once

#include <vector>

#include "sosinterp/apps/common.hpp"

namespace sosinterp::apps {

/// Zeros of the monic orthogonal polynomial with recurrence
/// p_{j+1} = (t - alpha_j) p_j - beta_j^2 p_{j-1}, ascending: eigenvalues of the
/// Jacobi matrix, then one Newton step on the recurrence.
std::vector<double> recurrence_roots(const VectorXd& alpha, const VectorXd& beta);

/// Zeros of the Legendre polynomial of degree k.
std::vector<double> legendre_roots(Index k);

/// Zeros of the Jacobi polynomial P_k^(0,1), weight (1 + t).
std::vector<double> jacobi01_roots(Index k);

/// Hermite interpolant in the Chebyshev basis; each node given once per
/// matched derivative order (value, then slope), at most twice. Solves the
/// confluent Chebyshev-Vandermonde system by column-pivoted QR.
class HermiteInterpolant {
 public:
  HermiteInterpolant(std::vector<double> nodes, const Sampler& f, const Sampler& df);
  double operator()(double t) const;
  Index degree() const noexcept { return coef_.size() - 1; }
  const VectorXd& coefficients() const noexcept { return coef_; }

 private:
  VectorXd coef_;
};

/// Best L1 lower approximant of degree n when f^(n+1) >= 0 on (-1, 1):
/// odd n = 2k - 1 matches f, f' at the Legendre-k zeros; even n = 2k matches f
/// at -1 and f, f' at the P_k^(0,1) zeros. Returned on Cheb1(n).
Poly hermite_l1_oracle(const Sampler& f, const Sampler& df, Index n);

/// Contact nodes used by hermite_l1_oracle, ascending.
std::vector<double> hermite_l1_nodes(Index n);

}  // namespace sosinterp::apps
