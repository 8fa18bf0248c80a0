#pragma once

#include <cstdint>
#include <vector>

#include "sosinterp/apps/common.hpp"

namespace sosinterp::apps {

struct EnvelopeOptions {
  /// Shift the data so every p_i <= 0 and keep the envelope values in a
  /// nonnegative block (redundant sign constraint instead of free variables).
  bool nonpositive = false;
};

/// Lower envelope of polynomials as an SDP on Cheb1(n):
///   max sum_l w_l p_l  s.t.  p_l + sum_m A_m^(l) . X_im = p_i(t_l),  X_im >= 0.
/// Row (i, l) has multiplier y_il; the Lagrange dual is
///   min sum p_i(t_l) y_il  s.t.  sum_i y_il = w_l,  sum_l y_il A_m^(l) >= 0.
struct EnvelopeProblem {
  sdp::BlockSdpProblem sdp;
  Grid grid;
  /// Clenshaw-Curtis weights of grid.
  VectorXd weights;
  /// Envelope values (free), or shift minus them (nonnegative).
  Index value_block = 0;
  double shift = 0;
  bool nonpositive = false;
  /// Polynomial values on grid, one column per polynomial.
  MatrixXd data;
  /// rows[i][l] is the constraint index of (i, l).
  std::vector<std::vector<Index>> rows;
  std::vector<ConeAttachment> cones;
};

/// m polynomials of degree d with Chebyshev coefficients drawn uniformly from
/// the integers in [-9, 9], each stored on Cheb1(d).
std::vector<Poly> random_chebyshev_polynomials(Index m, Index d, std::uint64_t seed);

EnvelopeProblem envelope_dual(const std::vector<Poly>& polys, Index n, const EnvelopeOptions& opt = {});

/// Envelope values on the grid, read off the primal solution.
Poly envelope_recover(const EnvelopeProblem& prob, const sdp::SdpSolution& sol);

/// Dual variables y_il as a grid-size x m matrix.
MatrixXd envelope_multipliers(const EnvelopeProblem& prob, const sdp::SdpSolution& sol);

}  // namespace sosinterp::apps
