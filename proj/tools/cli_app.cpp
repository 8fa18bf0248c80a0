#include "cli_app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <set>
#include <sstream>
#include <thread>

namespace sosinterp::cli {

namespace {

void add_common(CLI::App* sub, ExperimentConfig& c) {
  sub->add_option("--tol-gap", c.solver.tol_gap, "relative duality gap tolerance")->capture_default_str();
  sub->add_option("--tol-feas", c.solver.tol_feas, "relative infeasibility tolerance")->capture_default_str();
  sub->add_option("--max-iter", c.solver.max_iter, "interior-point iteration cap")->capture_default_str();
  sub->add_flag("--stall-exit", c.solver.allow_stall_exit, "iterate past the tolerances until progress stalls");
  sub->add_option("--csv", c.csv, "Table-1 style results CSV");
  sub->add_option("--table", c.table, "contact/support table CSV (printed when omitted)");
  sub->add_option("--curve", c.curve, "probe samples of the computed polynomials, for plotting");
  sub->add_option("--json", c.json, "JSON result record");
  if (sub->get_name() != "solve-sdpa") sub->add_option("--sdpa", c.sdpa, "export the built SDP in SDPA sparse format");
  sub->add_flag("--no-time", c.no_time, "omit solver times so reruns are byte-identical");
  sub->configurable();
}

struct Frontend {
  CLI::App app{"Polynomial optimization on [-1, 1] with interpolant-basis SOS certificates", "sosinterp"};
  ExperimentConfig cfg;
  CLI::App* envelope = nullptr;
  CLI::App* onesided = nullptr;
  CLI::App* design = nullptr;
  CLI::App* sdpa = nullptr;
  CLI::App* batch = nullptr;
  std::vector<std::string> batch_files;
  int jobs = 1;

  Frontend() {
    app.set_config("--config", "", "TOML or INI experiment file; a [envelope], [onesided], [design] or [solve-sdpa] section selects the command");
    app.require_subcommand(1);

    envelope = app.add_subcommand("envelope", "lower envelope of m random degree-d polynomials on n + 1 first-kind points");
    envelope->add_option("--m", cfg.m, "number of polynomials")->capture_default_str();
    envelope->add_option("--d", cfg.d, "polynomial degree")->capture_default_str();
    envelope->add_option("--n", cfg.n, "envelope degree (grid has n + 1 points)")->capture_default_str();
    envelope->add_option("--seed", cfg.seed, "coefficient RNG seed")->capture_default_str();
    envelope->add_flag("--nonpositive", cfg.nonpositive, "shift data below zero and keep the envelope in a sign-constrained block");
    add_common(envelope, cfg);

    onesided = app.add_subcommand("onesided", "best L1 approximation from below");
    onesided->add_option("--fn", cfg.fn, "exp_t100 or an expression in t")->capture_default_str();
    onesided->add_option("--n", cfg.points, "approximant points (degree n - 1)")->capture_default_str();
    onesided->add_option("--target-points", cfg.target_points, "first-kind points of the target interpolant")->capture_default_str();
    add_common(onesided, cfg);

    design = app.add_subcommand("design", "optimal experimental design on [-1, 1]");
    design->add_option("--model", cfg.model, "gauss_mixture, logistic or expr")->capture_default_str();
    design->add_option("--centers", cfg.centers, "gauss_mixture centers")->delimiter(',');
    design->add_option("--scale", cfg.scale, "gauss_mixture exponent scale")->capture_default_str();
    design->add_option("--beta", cfg.beta, "logistic (b0, b1)")->delimiter(',');
    design->add_option("--basis", cfg.basis, "expr basis functions, one expression per flag");
    design->add_option("--weight", cfg.weight, "expr noise weight (default 1)");
    design->add_option("--criterion", cfg.criterion, "E, A or D")->capture_default_str();
    design->add_option("--basis-points", cfg.basis_points, "replace each basis function by its interpolant on this many points")
        ->capture_default_str();
    design->add_option("--degree-policy", cfg.degree_policy, "chopped or adaptive")->capture_default_str();
    design->add_option("--interp-tol", cfg.interp_tol, "adaptive interpolation tolerance")->capture_default_str();
    design->add_option("--max-degree", cfg.max_degree, "cap on the support polynomial degree")->capture_default_str();
    add_common(design, cfg);

    sdpa = app.add_subcommand("solve-sdpa", "solve an SDPA sparse (.dat-s) file and print the JSON result record");
    sdpa->add_option("input", cfg.input, "SDPA file")->required();
    add_common(sdpa, cfg);

    batch = app.add_subcommand("run", "run several experiment files");
    batch->add_option("configs", batch_files, "experiment files")->required();
    batch->add_option("--jobs", jobs, "parallel jobs")->check(CLI::PositiveNumber)->capture_default_str();
  }

  void finish() {
    if (envelope->parsed()) cfg.command = Command::Envelope;
    if (onesided->parsed()) cfg.command = Command::Onesided;
    if (design->parsed()) cfg.command = Command::Design;
    if (sdpa->parsed()) cfg.command = Command::SolveSdpa;
  }
};

}  // namespace

ExperimentConfig parse_experiment(const std::vector<std::string>& args) {
  Frontend f;
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    f.app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw InvalidArgument(e.what());
  }
  if (f.batch->parsed()) throw InvalidArgument("an experiment file cannot select the run command");
  f.finish();
  return f.cfg;
}

int run_all(const std::vector<ExperimentConfig>& configs, int jobs, std::ostream& out) {
  std::set<std::string> seen;
  for (const auto& c : configs)
    for (const auto& p : c.output_paths())
      if (!seen.insert(p).second) {
        out << "error: output " << p << " is written by more than one experiment\n";
        return kExitBadConfig;
      }
  const std::size_t n = configs.size();
  std::vector<std::string> logs(n);
  std::vector<int> codes(n, 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      std::ostringstream os;
      codes[i] = run(configs[i], os);
      logs[i] = os.str();
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int k = 1; k < std::min<int>(jobs, int(n)); ++k) pool.emplace_back(worker);
    worker();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (n > 1) out << "[" << i + 1 << "/" << n << "] ";
    out << logs[i];
  }
  return n ? *std::max_element(codes.begin(), codes.end()) : kExitOptimal;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Frontend f;
  try {
    f.app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return f.app.exit(e, out, err) == 0 ? kExitOptimal : kExitBadConfig;
  }
  if (!f.batch->parsed()) {
    f.finish();
    return run(f.cfg, out);
  }
  std::vector<ExperimentConfig> configs;
  for (const auto& file : f.batch_files) {
    try {
      configs.push_back(parse_experiment({"--config", file}));
    } catch (const std::exception& e) {
      err << "error: " << file << ": " << e.what() << '\n';
      return kExitBadConfig;
    }
  }
  return run_all(configs, f.jobs, out);
}

}  // namespace sosinterp::cli
