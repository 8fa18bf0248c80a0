#pragma once

#include <string>
#include <vector>

#include "sosinterp/sdp/problem.hpp"

namespace sosinterp::sdp {

enum class Status { Optimal, PrimalInfeasible, DualInfeasible, SlowProgress, IterLimit };

const char* to_string(Status s);

struct SolverConfig {
  double tol_gap = 1e-9;
  double tol_feas = 1e-9;
  int max_iter = 200;
  /// Fraction of the distance to the cone boundary taken per step.
  double step_fraction = 0.98;
  /// Keep iterating past the tolerances until progress stalls, then return the
  /// best iterate seen.
  bool allow_stall_exit = false;
  /// Iterations over which the merit must drop by stall_reduction.
  int stall_window = 3;
  double stall_reduction = 0.1;

  void validate() const;
};

struct Residuals {
  double pinf = 0;
  double dinf = 0;
  double gap = 0;
};

struct IterationRecord {
  int iteration;
  double primal_objective;
  double dual_objective;
  double pinf;
  double dinf;
  double gap;
  double mu;
  double step_primal;
  double step_dual;
  double sigma;
};

/// Primal X, dual y and slack Z in the problem's own sense: A^T y + Z = C, so
/// Z is PSD for minimization and negative semidefinite for maximization.
struct SdpSolution {
  BlockValues X;
  VectorXd y;
  BlockValues Z;
  Status status = Status::IterLimit;
  int iterations = 0;
  Residuals residuals;
  double primal_objective = 0;
  double dual_objective = 0;
  std::vector<IterationRecord> trace;
  std::string message;
};

/// pinf = |A(X) - b| / (1 + |b|), dinf = |A^T y + Z - C| / (1 + |C|),
/// gap = |<C,X> - b^T y| / (1 + |<C,X>| + |b^T y|).
Residuals residuals(const BlockSdpProblem& p, const SdpSolution& sol);
Residuals residuals(const BlockSdpProblem& p, const BlockValues& X, const VectorXd& y, const BlockValues& Z);

/// Infeasible primal-dual path following, HKM direction with Mehrotra
/// predictor-corrector. Free variables enter the Schur system through an
/// augmented block.
SdpSolution solve(const BlockSdpProblem& p, const SolverConfig& cfg = {});

}  // namespace sosinterp::sdp
