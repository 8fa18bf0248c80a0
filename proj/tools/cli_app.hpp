#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "experiment.hpp"

namespace sosinterp::cli {

/// Parses one experiment from command-line style arguments (program name
/// excluded), e.g. {"envelope", "--n", "99"} or {"--config", "run.toml"}.
/// Throws InvalidArgument with CLI11's message on bad flags.
ExperimentConfig parse_experiment(const std::vector<std::string>& args);

/// Runs the configs on up to `jobs` threads. Each job's log is buffered and
/// written to `out` in config order; returns the largest exit code.
int run_all(const std::vector<ExperimentConfig>& configs, int jobs, std::ostream& out);

/// Entry point of the sosinterp executable.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sosinterp::cli
