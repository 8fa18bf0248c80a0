#pragma once

#include <functional>
#include <vector>

#include "sosinterp/apps/common.hpp"

namespace sosinterp::apps {

/// min c^T x  s.t.  sum_i a_ji(t) x_i <= b_j  for all t in [-1, 1], j = 1..rows.
struct SemiInfiniteProgram {
  Index num_vars = 0;
  /// rows[j][i] samples a_ji.
  std::vector<std::vector<Sampler>> rows;
  VectorXd rhs;
  /// Minimized; empty means a feasibility problem.
  VectorXd objective;
  /// Extra constraints on x, added to the SDP after the semi-infinite rows.
  std::function<void(sdp::BlockSdpProblem&, Index x_block)> extra;
};

struct SilpProblem {
  sdp::BlockSdpProblem sdp;
  Index x_block = 0;
  /// Per row: the common second-kind grid and the values of a_ji on it.
  std::vector<Grid> grids;
  std::vector<MatrixXd> row_values;
  std::vector<ConeAttachment> cones;
  VectorXd rhs;
};

/// Interpolates every a_ji adaptively to tol, upsamples each row to its finest
/// entry grid, and makes b_j - sum_i x_i p_ji an interval-cone member there.
SilpProblem build_silp_sdp(const SemiInfiniteProgram& sip, double tol);

VectorXd silp_solution(const SilpProblem& prob, const sdp::SdpSolution& sol);

/// b_j - sum_i x_i p_ji as an interpolant on row j's grid.
Poly silp_residual(const SilpProblem& prob, Index row, const sdp::SdpSolution& sol);

}  // namespace sosinterp::apps
