#include "experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>

#include <json.hpp>

#include "expression.hpp"
#include "sosinterp/apps.hpp"
#include "sosinterp/sdp/json.hpp"
#include "sosinterp/sdp/sdpa.hpp"

namespace sosinterp::cli {

const char* to_string(Command c) {
  switch (c) {
    case Command::Envelope: return "envelope";
    case Command::Onesided: return "onesided";
    case Command::Design: return "design";
    case Command::SolveSdpa: return "solve-sdpa";
  }
  return "?";
}

int exit_code(sdp::Status s) {
  switch (s) {
    case sdp::Status::Optimal: return kExitOptimal;
    case sdp::Status::PrimalInfeasible:
    case sdp::Status::DualInfeasible: return kExitInfeasible;
    default: return kExitNumerical;
  }
}

namespace {

using apps::Sampler;
using Eigen::VectorXd;

constexpr long kCurvePoints = 1001;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16g", v);
  return buf;
}

Sampler onesided_function(const std::string& fn) {
  if (fn == "exp_t100") return [](double t) { return std::exp(std::pow(t, 100)); };
  return Expression::parse(fn);
}

apps::FisherModel design_model(const ExperimentConfig& cfg) {
  if (cfg.model == "gauss_mixture") return apps::gaussian_mixture_model(cfg.centers, cfg.scale);
  if (cfg.model == "logistic") return apps::logistic_model(cfg.beta[0], cfg.beta[1]);
  apps::FisherModel m;
  m.name = "expr";
  for (const auto& b : cfg.basis) m.basis.push_back(Expression::parse(b));
  if (!cfg.weight.empty()) m.weight = Expression::parse(cfg.weight);
  return m;
}

apps::CriterionRep criterion(const std::string& name, Eigen::Index dim) {
  if (name == "E") return apps::e_optimality(dim);
  if (name == "A") return apps::a_optimality(dim);
  return apps::d_optimality(dim);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InvalidArgument("cannot write " + path);
  return os;
}

/// Table-1 style row shared by every command.
struct SolveReport {
  long points = 0;
  sdp::SdpSolution solution;
  double seconds = 0;
};

void export_if_requested(const ExperimentConfig& cfg, const sdp::BlockSdpProblem& p) {
  if (cfg.sdpa.empty()) return;
  auto os = open_output(cfg.sdpa);
  sdp::export_sdpa(p, os);
}

template <typename F>
SolveReport timed_solve(long points, F&& solve) {
  SolveReport r;
  r.points = points;
  const auto t0 = std::chrono::steady_clock::now();
  r.solution = solve();
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

void write_outputs(const ExperimentConfig& cfg, const SolveReport& rep, nlohmann::json record, std::ostream& log) {
  const auto& sol = rep.solution;
  const std::string time = cfg.no_time ? "" : num(rep.seconds);
  if (!cfg.csv.empty()) {
    auto os = open_output(cfg.csv);
    os << "command,points,iterations,solver_time_s,primal_inf,dual_inf,duality_gap,status\n";
    os << to_string(cfg.command) << ',' << rep.points << ',' << sol.iterations << ',' << time << ','
       << num(sol.residuals.pinf) << ',' << num(sol.residuals.dinf) << ',' << num(sol.residuals.gap) << ','
       << sdp::to_string(sol.status) << '\n';
  }
  if (!cfg.json.empty()) {
    record["command"] = to_string(cfg.command);
    record["points"] = rep.points;
    record["solver"] = sdp::result_record(sol);
    if (!cfg.no_time) record["solver"]["solver_time_s"] = rep.seconds;
    auto os = open_output(cfg.json);
    os << record.dump(2) << '\n';
  }
  log << to_string(cfg.command) << ": " << sdp::to_string(sol.status) << ", " << sol.iterations << " iterations";
  if (!cfg.no_time) log << ", " << num(rep.seconds) << " s";
  log << ", pinf " << num(sol.residuals.pinf) << ", dinf " << num(sol.residuals.dinf) << ", gap "
      << num(sol.residuals.gap) << '\n';
  if (!sol.message.empty()) log << "  " << sol.message << '\n';
}

void write_curve(const std::string& path, const std::string& header, const std::function<std::string(double)>& row) {
  if (path.empty()) return;
  auto os = open_output(path);
  os << header << '\n';
  for (long i = 0; i < kCurvePoints; ++i) {
    const double t = -1.0 + 2.0 * double(i) / double(kCurvePoints - 1);
    os << num(t) << ',' << row(t) << '\n';
  }
}

/// Writes `body` to cfg.table, or to the log when no table path is set.
void emit_table(const ExperimentConfig& cfg, const std::string& body, std::ostream& log) {
  if (cfg.table.empty()) {
    log << body;
    return;
  }
  auto os = open_output(cfg.table);
  os << body;
}

int run_envelope(const ExperimentConfig& cfg, std::ostream& log) {
  const auto polys = apps::random_chebyshev_polynomials(cfg.m, cfg.d, cfg.seed);
  apps::EnvelopeOptions opt;
  opt.nonpositive = cfg.nonpositive;
  const auto prob = apps::envelope_dual(polys, cfg.n, opt);
  export_if_requested(cfg, prob.sdp);
  const SolveReport rep = timed_solve(cfg.n + 1, [&] { return sdp::solve(prob.sdp, cfg.solver); });
  nlohmann::json record;
  record["m"] = cfg.m;
  record["d"] = cfg.d;
  record["seed"] = cfg.seed;
  const bool usable = rep.solution.status == sdp::Status::Optimal || rep.solution.status == sdp::Status::SlowProgress;
  if (usable) {
    const auto env = apps::envelope_recover(prob, rep.solution);
    record["integral"] = rep.solution.primal_objective;
    std::string header = "t";
    for (long i = 0; i < cfg.m; ++i) header += ",p" + std::to_string(i + 1);
    write_curve(cfg.curve, header + ",envelope", [&](double t) {
      std::string r;
      for (const auto& p : polys) r += num(p(t)) + ',';
      return r + num(env(t));
    });
  }
  write_outputs(cfg, rep, record, log);
  return exit_code(rep.solution.status);
}

int run_onesided(const ExperimentConfig& cfg, std::ostream& log) {
  const Sampler f = onesided_function(cfg.fn);
  const auto target = apps::Poly::from_function(apps::Grid::first_kind(cfg.target_points - 1), f);
  const long degree = cfg.points - 1;
  const auto prob = apps::onesided_dual(target, degree);
  export_if_requested(cfg, prob.sdp);
  const SolveReport rep = timed_solve(cfg.target_points, [&] { return sdp::solve(prob.sdp, cfg.solver); });
  nlohmann::json record;
  record["fn"] = cfg.fn;
  record["degree"] = degree;
  const auto& sol = rep.solution;
  if (sol.status == sdp::Status::Optimal || sol.status == sdp::Status::SlowProgress) {
    const auto contacts = apps::onesided_contacts(prob, sol);
    const auto nodes = apps::hermite_l1_nodes(degree);
    const bool paired = nodes.size() == contacts.size();
    std::string body = "index,contact,hermite_node,abs_error\n";
    for (std::size_t i = 0; i < contacts.size(); ++i) {
      body += std::to_string(i + 1) + ',' + num(contacts[i]) + ',';
      if (paired) body += num(nodes[i]) + ',' + num(std::abs(contacts[i] - nodes[i]));
      else body += ',';
      body += '\n';
    }
    record["contacts"] = contacts;
    record["l1_error"] = apps::onesided_l1(prob, sol);
    write_outputs(cfg, rep, record, log);
    emit_table(cfg, body, log);
    const auto p = apps::onesided_recover(prob, sol);
    write_curve(cfg.curve, "t,f,approximant", [&](double t) { return num(f(t)) + ',' + num(p(t)); });
  } else {
    write_outputs(cfg, rep, record, log);
  }
  return exit_code(sol.status);
}

int run_design(const ExperimentConfig& cfg, std::ostream& log) {
  const apps::FisherModel model = design_model(cfg);
  apps::SupportOptions opt;
  opt.degree_policy = cfg.degree_policy == "adaptive" ? apps::DegreePolicy::Adaptive : apps::DegreePolicy::Chopped;
  opt.tol = cfg.interp_tol;
  opt.basis_points = cfg.basis_points;
  opt.max_degree = cfg.max_degree;
  const auto prob = cfg.criterion == "E" ? apps::eoptimal_support_sdp(model, opt)
                                         : apps::general_support_sdp(model, criterion(cfg.criterion, model.dim()), opt);
  export_if_requested(cfg, prob.sdp);
  const SolveReport rep = timed_solve(prob.grid.size(), [&] { return sdp::solve(prob.sdp, cfg.solver); });
  nlohmann::json record;
  record["model"] = cfg.model;
  record["criterion"] = cfg.criterion;
  record["degree"] = prob.grid.degree();
  const auto& sol = rep.solution;
  if (sol.status != sdp::Status::Optimal && sol.status != sdp::Status::SlowProgress) {
    write_outputs(cfg, rep, record, log);
    return exit_code(sol.status);
  }
  const apps::DesignResult res = apps::design_from_solution(prob, sol, cfg.solver);
  record["bound"] = res.bound;
  record["degenerate"] = res.degenerate;
  record["support"] = res.support;
  record["weights"] = std::vector<double>(res.weights.data(), res.weights.data() + res.weights.size());
  record["criterion_value"] = res.criterion_value;
  write_outputs(cfg, rep, record, log);
  if (res.degenerate) {
    log << "  " << res.message << '\n';
  } else {
    std::string body = "index,point,weight\n";
    for (std::size_t i = 0; i < res.support.size(); ++i)
      body += std::to_string(i + 1) + ',' + num(res.support[i]) + ',' + num(res.weights(Eigen::Index(i))) + '\n';
    emit_table(cfg, body, log);
  }
  write_curve(cfg.curve, "t,pi", [&](double t) { return num(res.pi(t)); });
  return exit_code(sol.status);
}

int run_sdpa(const ExperimentConfig& cfg, std::ostream& log) {
  const auto problem = sdp::import_sdpa(std::filesystem::path(cfg.input));
  const SolveReport rep = timed_solve(long(problem.num_constraints()), [&] { return sdp::solve(problem, cfg.solver); });
  nlohmann::json record;
  record["input"] = cfg.input;
  write_outputs(cfg, rep, record, log);
  auto rec = sdp::result_record(rep.solution);
  if (!cfg.no_time) rec["solver_time_s"] = rep.seconds;
  log << rec.dump(2) << '\n';
  return exit_code(rep.solution.status);
}

}  // namespace

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument(what);
  };
  solver.validate();
  switch (command) {
    case Command::Envelope:
      require(m >= 1, "envelope: m must be at least 1");
      require(d >= 0, "envelope: d must be nonnegative");
      require(n >= d, "envelope: n must be at least d");
      break;
    case Command::Onesided:
      require(points >= 1, "onesided: n (approximant points) must be at least 1");
      require(target_points > points, "onesided: target points must exceed the approximant points");
      if (fn != "exp_t100") (void)Expression::parse(fn);
      break;
    case Command::Design:
      require(model == "gauss_mixture" || model == "logistic" || model == "expr",
              "design: model must be gauss_mixture, logistic or expr");
      require(criterion == "E" || criterion == "A" || criterion == "D", "design: criterion must be E, A or D");
      require(degree_policy == "chopped" || degree_policy == "adaptive", "design: degree policy must be chopped or adaptive");
      require(interp_tol > 0, "design: interpolation tolerance must be positive");
      require(basis_points == 0 || basis_points >= 2, "design: basis points must be 0 or at least 2");
      require(max_degree >= 1, "design: max degree must be positive");
      if (model == "gauss_mixture") {
        require(!centers.empty(), "design: gauss_mixture needs centers");
        require(scale > 0, "design: gauss_mixture needs a positive scale");
      }
      if (model == "logistic") require(beta.size() == 2, "design: logistic needs beta = (b0, b1)");
      if (model == "expr") {
        require(!basis.empty(), "design: expr model needs at least one basis expression");
        for (const auto& b : basis) (void)Expression::parse(b);
        if (!weight.empty()) (void)Expression::parse(weight);
      }
      break;
    case Command::SolveSdpa:
      require(!input.empty(), "solve-sdpa: input file required");
      require(sdpa.empty(), "solve-sdpa: --sdpa export is for the problem builders");
      break;
  }
  const auto paths = output_paths();
  require(std::set<std::string>(paths.begin(), paths.end()).size() == paths.size(), "output paths must be distinct");
}

std::vector<std::string> ExperimentConfig::output_paths() const {
  std::vector<std::string> out;
  for (const auto* p : {&csv, &table, &curve, &json, &sdpa})
    if (!p->empty()) out.push_back(*p);
  return out;
}

int run(const ExperimentConfig& cfg, std::ostream& log) {
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitBadConfig;
  }
  try {
    switch (cfg.command) {
      case Command::Envelope: return run_envelope(cfg, log);
      case Command::Onesided: return run_onesided(cfg, log);
      case Command::Design: return run_design(cfg, log);
      case Command::SolveSdpa: return run_sdpa(cfg, log);
    }
  } catch (const apps::UnsolvedError& e) {
    log << "error: " << e.what() << '\n';
    return exit_code(e.status());
  } catch (const InvalidArgument& e) {
    log << "error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const ParseError& e) {
    log << "error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitBadConfig;
}

}  // namespace sosinterp::cli
