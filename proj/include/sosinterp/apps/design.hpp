#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sosinterp/apps/common.hpp"

namespace sosinterp::apps {

/// Regression model: Fisher information of a point t is f(t) f(t)^T w(t).
struct FisherModel {
  std::vector<Sampler> basis;
  /// Noise weight, nonnegative on [-1, 1]; constant 1 when empty.
  Sampler weight;
  std::string name;

  Index dim() const noexcept { return Index(basis.size()); }
  double noise_weight(double t) const { return weight ? weight(t) : 1.0; }
  VectorXd features(double t) const;
  /// f(t) f(t)^T w(t).
  MatrixXd information(double t) const;
  /// Throws InvalidArgument when the model is empty or w < 0 on a probe grid.
  void validate() const;
};

/// sum_i r_i f(t_i) f(t_i)^T w(t_i); weights nonnegative and summing to 1.
MatrixXd fisher_matrix(const FisherModel& model, const VectorXd& points, const VectorXd& weights);

/// Basis functions of a nonlinear model: partial derivatives in beta at beta_hat.
using ParametricSampler = std::function<double(double, const VectorXd&)>;
FisherModel local_design_model(const std::vector<ParametricSampler>& partials, const VectorXd& beta_hat,
                               Sampler weight = {}, std::string name = "local");

/// Partial derivatives of 1 / (1 + exp(-(b0 + b1 t))) in (b0, b1).
std::vector<ParametricSampler> logistic_partials();
/// Local model of the logistic regression at beta_hat = (b0, b1).
FisherModel logistic_model(double b0, double b1);
/// Gaussian bumps exp(-scale (t - mu_i)^2).
FisherModel gaussian_mixture_model(const std::vector<double>& centers, double scale);

/// One block of a semidefinite representation
///   Phi(X) >= z  <=>  exists u: A_i(X) + B_i z + sum_j u_j C_ij + D_i >= 0 for all i.
struct CriterionBlock {
  Index size = 0;
  std::function<MatrixXd(const MatrixXd&)> A;
  MatrixXd B;
  /// One matrix per auxiliary variable; empty means zero.
  std::vector<MatrixXd> C;
  MatrixXd D;
};

struct CriterionRep {
  std::string name;
  /// Model dimension m.
  Index dim = 0;
  /// Auxiliary variable count.
  Index num_aux = 0;
  std::vector<CriterionBlock> blocks;

  void validate() const;
};

/// lambda_min(X) >= z: X - z I >= 0.
CriterionRep e_optimality(Index m);
/// -tr(X^-1) >= z: [[X, I], [I, U]] >= 0 and -tr U - z >= 0.
CriterionRep a_optimality(Index m);
/// det(X)^(1/m) >= z: [[X, L], [L^T, diag L]] >= 0 with L lower triangular, and
/// the geometric mean of diag L bounded by a binary tree of 2 x 2 blocks.
CriterionRep d_optimality(Index m);

/// Phi(X) for the representation, by solving its small SDP in (z, u).
double criterion_value(const CriterionRep& crit, const MatrixXd& X, const sdp::SolverConfig& cfg = {});

enum class DegreePolicy {
  /// Largest degree after chopping trailing coefficients of the products.
  Chopped,
  /// Largest adaptive grid degree of the products.
  Adaptive
};

struct SupportOptions {
  DegreePolicy degree_policy = DegreePolicy::Chopped;
  double tol = 1e-14;
  /// When positive, every basis function is replaced by its interpolant on
  /// this many second-kind Chebyshev points before anything else.
  Index basis_points = 0;
  Index max_degree = 4096;
};

/// Support SDP: min y  s.t.  sum_i <W_i, B_i> = -1,  sum_i C_i^*(W_i) = 0,
///   pi(t) = y - sum_i <W_i, A_i(M_t) + D_i> >= 0 on [-1, 1],  W_i >= 0,
/// with pi carried by its values on Cheb1(degree).
struct SupportProblem {
  sdp::BlockSdpProblem sdp;
  /// The model actually sampled (interpolated basis when basis_points > 0).
  FisherModel model;
  CriterionRep criterion;
  Grid grid;
  Index y_block = 0;
  std::vector<Index> w_blocks;
  std::vector<Index> pi_rows;
  ConeAttachment cone;
  /// Per grid point and block: A_i(M_t) + D_i.
  std::vector<std::vector<MatrixXd>> bracket;
};

/// Degree of pi under the options: products f_i f_j w, or 2 (basis_points - 1)
/// plus the weight's degree when the basis is interpolated.
Index support_degree(const FisherModel& model, const SupportOptions& opt);

/// Dedicated E-optimal builder: tr W = 1, pi = y - W . M_t with rank-one rows.
SupportProblem eoptimal_support_sdp(const FisherModel& model, const SupportOptions& opt = {});
SupportProblem general_support_sdp(const FisherModel& model, const CriterionRep& crit, const SupportOptions& opt = {});

/// pi on the grid from the primal solution.
Poly support_polynomial(const SupportProblem& prob, const sdp::SdpSolution& sol);

/// Optimal weights on a fixed support: max Phi(sum r_i M_{t_i}) over the simplex.
/// Weights below 1e-8 are dropped and the rest renormalized.
struct WeightResult {
  VectorXd weights;
  double value = 0;
  sdp::SdpSolution solution;
};
WeightResult design_weights(const std::vector<double>& support, const FisherModel& model, const CriterionRep& crit,
                            const sdp::SolverConfig& cfg = {});

struct DesignResult {
  std::vector<double> support;
  VectorXd weights;
  /// Phi of the optimal design's information matrix.
  double criterion_value = 0;
  /// The support SDP's optimum y.
  double bound = 0;
  Poly pi;
  /// pi vanished identically; every point of [-1, 1] is a root.
  bool degenerate = false;
  Index degree = 0;
  sdp::SdpSolution solution;
  std::string message;
};

/// Root extraction and weights for an already solved support SDP; throws
/// UnsolvedError unless the status is usable.
DesignResult design_from_solution(const SupportProblem& prob, sdp::SdpSolution sol, const sdp::SolverConfig& cfg = {});

/// Support SDP, root extraction, then weights.
DesignResult optimal_design(const FisherModel& model, const CriterionRep& crit, const SupportOptions& opt = {},
                            const sdp::SolverConfig& cfg = {});
/// Same with the dedicated E-optimal builder.
DesignResult eoptimal_design(const FisherModel& model, const SupportOptions& opt = {}, const sdp::SolverConfig& cfg = {});

/// max |g - interpolant| on a uniform probe of probe_points, for n_points
/// equispaced or second-kind Chebyshev nodes.
double equispaced_interpolation_error(const Sampler& g, Index n_points, Index probe_points = 10001);
double chebyshev_interpolation_error(const Sampler& g, Index n_points, Index probe_points = 10001);

}  // namespace sosinterp::apps
