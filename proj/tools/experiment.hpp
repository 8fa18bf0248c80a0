#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "sosinterp/sdp/solver.hpp"

namespace sosinterp::cli {

enum class Command { Envelope, Onesided, Design, SolveSdpa };

const char* to_string(Command c);

/// One experiment; every field has a usable default.
struct ExperimentConfig {
  Command command = Command::Envelope;

  // envelope: m random polynomials of degree d on Cheb1(n)
  long m = 2;
  long d = 5;
  long n = 99;
  std::uint64_t seed = 1;
  bool nonpositive = false;

  // onesided: approximant on `points` points (degree points - 1), target
  // interpolated on `target_points` first-kind points
  std::string fn = "exp_t100";
  long points = 50;
  long target_points = 200;

  // design
  std::string model = "gauss_mixture";
  std::vector<double> centers{-0.5, 0.0, 0.5};
  double scale = 3.0;
  std::vector<double> beta{0.0, 12.0};
  std::vector<std::string> basis;
  std::string weight;
  std::string criterion = "E";
  long basis_points = 0;
  std::string degree_policy = "chopped";
  double interp_tol = 1e-14;
  long max_degree = 4096;

  // solve-sdpa
  std::string input;

  sdp::SolverConfig solver;

  // outputs; empty paths are skipped
  std::string csv;
  std::string table;
  std::string curve;
  std::string json;
  /// Export of the built SDP in SDPA sparse format (not for solve-sdpa).
  std::string sdpa;
  /// Leave solver times out of every output so reruns compare byte for byte.
  bool no_time = false;

  /// Throws InvalidArgument on the first bad field.
  void validate() const;
  std::vector<std::string> output_paths() const;
};

/// Exit codes of run().
inline constexpr int kExitOptimal = 0;
inline constexpr int kExitBadConfig = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitNumerical = 3;

int exit_code(sdp::Status s);

/// Validates, runs, writes the requested files and a human summary to `log`.
int run(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace sosinterp::cli
