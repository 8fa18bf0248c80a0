#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sosinterp/chebkit/interpolant.hpp"
#include "sosinterp/sdp/problem.hpp"
#include "sosinterp/sdp/solver.hpp"
#include "sosinterp/soscone/cones.hpp"

namespace sosinterp::apps {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Grid = cheb::InterpolationGrid<double>;
using Poly = cheb::Interpolant<double>;
using IntervalCone = sos::IntervalNonnegCone<double>;
using Sampler = std::function<double(double)>;

/// A solve whose status does not carry a usable primal point.
class UnsolvedError : public Error {
 public:
  UnsolvedError(const std::string& what, sdp::Status status)
      : Error(what + ": solver status " + sdp::to_string(status)), status_(status) {}
  sdp::Status status() const noexcept { return status_; }

 private:
  sdp::Status status_;
};

/// Throws UnsolvedError unless the status is Optimal or SlowProgress.
void require_usable(const sdp::SdpSolution& sol, const std::string& what);

/// PSD blocks of an interval cone wired into existing constraint rows: row l
/// gains scale * sum_m A_m^(l) . X_m.
struct ConeAttachment {
  IntervalCone cone;
  std::vector<Index> blocks;
  std::vector<Index> rows;
};

ConeAttachment attach_interval_cone(sdp::BlockSdpProblem& p, IntervalCone cone, std::vector<Index> rows,
                                    double scale = 1.0);

/// Cone polynomial values at the cone grid for the solution's certificate blocks.
VectorXd cone_values(const ConeAttachment& c, const sdp::SdpSolution& sol);

/// Local minimizers t of r on [-1, 1] with |r(t)| <= rel_tol * max|r|, merged
/// when closer than dedup.
std::vector<double> contact_points(const Poly& r, double rel_tol = 1e-6, double dedup = 1e-8);

/// Outcome of a nonnegativity certification on [-1, 1].
struct Certificate {
  bool certified = false;
  sdp::Status status = sdp::Status::IterLimit;
  std::vector<MatrixXd> blocks;
  /// max_l |(cone value - p)(t_l)| / (1 + max|p|).
  double residual = 0;
};

/// Looks for PSD blocks showing p is a weighted SOS of its own degree on Cheb1(deg p).
Certificate certify_nonnegative(const Poly& p, const sdp::SolverConfig& cfg = {});

}  // namespace sosinterp::apps
