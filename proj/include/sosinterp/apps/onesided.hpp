#pragma once

#include <vector>

#include "sosinterp/apps/common.hpp"

namespace sosinterp::apps {

/// Best L1 approximation from below of degree `degree`, as an SDP on the
/// target's first-kind grid (N + 1 points) with the approximant on Cheb1(degree):
///   max sum_l w_l q_l  s.t.  q_l + sum_m A_m^(l) . X_m = f_l,  q - B p = 0.
/// Multipliers y of the first rows and z of the second give the dual
///   min f^T y  s.t.  y_l + z_l = w_l,  sum_l y_l A_m^(l) >= 0,  B^T z = 0.
struct OnesidedProblem {
  sdp::BlockSdpProblem sdp;
  /// f resampled on Cheb1(N).
  Poly target;
  Grid coarse;
  /// Values on coarse -> values on the target grid.
  MatrixXd B;
  VectorXd weights;
  Index bound_block = 0;
  Index approx_block = 0;
  std::vector<Index> sos_rows;
  std::vector<Index> coupling_rows;
  ConeAttachment cone;
};

/// f must live on a Chebyshev grid; degree < f.degree().
OnesidedProblem onesided_dual(const Poly& f, Index degree);

/// The lower approximant on Cheb1(degree).
Poly onesided_recover(const OnesidedProblem& prob, const sdp::SdpSolution& sol);

/// f - B p on the target grid.
Poly onesided_gap(const OnesidedProblem& prob, const sdp::SdpSolution& sol);

/// Points where the approximant touches f, ascending.
std::vector<double> onesided_contacts(const OnesidedProblem& prob, const sdp::SdpSolution& sol, double rel_tol = 1e-6);

/// Integral of f - p over [-1, 1].
double onesided_l1(const OnesidedProblem& prob, const sdp::SdpSolution& sol);

}  // namespace sosinterp::apps
