#include "sosinterp/apps/design.hpp"

#include <algorithm>
#include <cmath>

#include "sosinterp/chebkit/adaptive.hpp"

namespace sosinterp::apps {

VectorXd FisherModel::features(double t) const {
  VectorXd f(dim());
  for (Index i = 0; i < dim(); ++i) f(i) = basis[std::size_t(i)](t);
  return f;
}

MatrixXd FisherModel::information(double t) const {
  const VectorXd f = features(t);
  return noise_weight(t) * f * f.transpose();
}

void FisherModel::validate() const {
  if (basis.empty()) throw InvalidArgument("model needs at least one basis function");
  for (const auto& b : basis)
    if (!b) throw InvalidArgument("model basis function is empty");
  if (weight) {
    const Grid probe = Grid::second_kind(256);
    for (Index l = 0; l < probe.size(); ++l)
      if (!(weight(probe[l]) >= 0.0)) throw InvalidArgument("noise weight is negative at t = " + std::to_string(probe[l]));
  }
}

MatrixXd fisher_matrix(const FisherModel& model, const VectorXd& points, const VectorXd& weights) {
  if (points.size() != weights.size()) throw InvalidArgument("one weight per design point expected");
  MatrixXd M = MatrixXd::Zero(model.dim(), model.dim());
  for (Index i = 0; i < points.size(); ++i) {
    if (!(weights(i) >= 0.0)) throw InvalidArgument("design weights must be nonnegative");
    M += weights(i) * model.information(points(i));
  }
  return M;
}

FisherModel local_design_model(const std::vector<ParametricSampler>& partials, const VectorXd& beta_hat,
                               Sampler weight, std::string name) {
  FisherModel m;
  for (const auto& d : partials) m.basis.push_back([d, beta_hat](double t) { return d(t, beta_hat); });
  m.weight = std::move(weight);
  m.name = std::move(name);
  return m;
}

std::vector<ParametricSampler> logistic_partials() {
  auto g = [](double t, const VectorXd& b) { return 1.0 / (2.0 + 2.0 * std::cosh(b(0) + b(1) * t)); };
  return {g, [g](double t, const VectorXd& b) { return t * g(t, b); }};
}

FisherModel logistic_model(double b0, double b1) {
  return local_design_model(logistic_partials(), Eigen::Vector2d(b0, b1), {}, "logistic");
}

FisherModel gaussian_mixture_model(const std::vector<double>& centers, double scale) {
  FisherModel m;
  for (double mu : centers) m.basis.push_back([mu, scale](double t) { return std::exp(-scale * (t - mu) * (t - mu)); });
  m.name = "gauss_mixture";
  return m;
}

void CriterionRep::validate() const {
  if (dim < 1) throw InvalidArgument("criterion dimension must be positive");
  if (num_aux < 0) throw InvalidArgument("auxiliary variable count must be nonnegative");
  if (blocks.empty()) throw InvalidArgument("criterion needs at least one block");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    const std::string tag = "criterion block " + std::to_string(i);
    if (b.size < 1 || !b.A) throw InvalidArgument(tag + " has no size or no A map");
    const MatrixXd a = b.A(MatrixXd::Identity(dim, dim));
    if (a.rows() != b.size || a.cols() != b.size) throw InvalidArgument(tag + ": A has the wrong shape");
    if (b.B.rows() != b.size || b.B.cols() != b.size) throw InvalidArgument(tag + ": B has the wrong shape");
    if (b.D.rows() != b.size || b.D.cols() != b.size) throw InvalidArgument(tag + ": D has the wrong shape");
    if (!b.C.empty() && Index(b.C.size()) != num_aux) throw InvalidArgument(tag + ": one C matrix per auxiliary variable");
    for (const auto& c : b.C)
      if (c.rows() != b.size || c.cols() != b.size) throw InvalidArgument(tag + ": C has the wrong shape");
  }
}

CriterionRep e_optimality(Index m) {
  if (m < 1) throw InvalidArgument("criterion dimension must be positive");
  CriterionBlock b;
  b.size = m;
  b.A = [](const MatrixXd& X) { return X; };
  b.B = -MatrixXd::Identity(m, m);
  b.D = MatrixXd::Zero(m, m);
  return {"E", m, 0, {b}};
}

namespace {

/// Index of U_(a,b), a >= b, in packed lower-triangular order.
Index packed(Index a, Index b) { return a * (a + 1) / 2 + b; }

std::function<MatrixXd(const MatrixXd&)> embed_top_left(Index k) {
  return [k](const MatrixXd& X) {
    MatrixXd out = MatrixXd::Zero(k, k);
    out.topLeftCorner(X.rows(), X.cols()) = X;
    return out;
  };
}

}  // namespace

CriterionRep a_optimality(Index m) {
  if (m < 1) throw InvalidArgument("criterion dimension must be positive");
  const Index aux = m * (m + 1) / 2;
  CriterionBlock lmi;
  lmi.size = 2 * m;
  lmi.A = embed_top_left(2 * m);
  lmi.B = MatrixXd::Zero(2 * m, 2 * m);
  lmi.D = MatrixXd::Zero(2 * m, 2 * m);
  lmi.D.topRightCorner(m, m).setIdentity();
  lmi.D.bottomLeftCorner(m, m).setIdentity();
  CriterionBlock trace;
  trace.size = 1;
  trace.A = [](const MatrixXd&) { return MatrixXd::Zero(1, 1); };
  trace.B = MatrixXd::Constant(1, 1, -1.0);
  trace.D = MatrixXd::Zero(1, 1);
  for (Index a = 0; a < m; ++a) {
    for (Index b = 0; b <= a; ++b) {
      MatrixXd c = MatrixXd::Zero(2 * m, 2 * m);
      c(m + a, m + b) = 1.0;
      c(m + b, m + a) = 1.0;
      lmi.C.push_back(c);
      trace.C.push_back(MatrixXd::Constant(1, 1, a == b ? -1.0 : 0.0));
    }
  }
  return {"A", m, aux, {lmi, trace}};
}

CriterionRep d_optimality(Index m) {
  if (m < 1) throw InvalidArgument("criterion dimension must be positive");
  const Index tri = m * (m + 1) / 2;
  Index leaves = 1;
  while (leaves < m) leaves *= 2;
  // node values are affine in (z, u): coefficient on z and on each u_j
  struct Affine {
    double z = 0;
    Index u = -1;
  };
  // internal tree nodes other than the root get their own auxiliary variable
  const Index inner = leaves >= 2 ? leaves - 2 : 0;
  const Index aux = tri + inner;

  CriterionBlock lmi;
  lmi.size = 2 * m;
  lmi.A = embed_top_left(2 * m);
  lmi.B = MatrixXd::Zero(2 * m, 2 * m);
  lmi.D = MatrixXd::Zero(2 * m, 2 * m);
  lmi.C.assign(std::size_t(aux), MatrixXd::Zero(2 * m, 2 * m));
  for (Index a = 0; a < m; ++a) {
    for (Index b = 0; b <= a; ++b) {
      MatrixXd& c = lmi.C[std::size_t(packed(a, b))];
      c(a, m + b) = c(m + b, a) = 1.0;
      if (a == b) c(m + a, m + a) = 1.0;
    }
  }
  CriterionRep rep{"D", m, aux, {lmi}};

  if (m == 1) {
    // L_00 - z >= 0
    CriterionBlock leaf;
    leaf.size = 1;
    leaf.A = [](const MatrixXd&) { return MatrixXd::Zero(1, 1); };
    leaf.B = MatrixXd::Constant(1, 1, -1.0);
    leaf.D = MatrixXd::Zero(1, 1);
    leaf.C.assign(std::size_t(aux), MatrixXd::Zero(1, 1));
    leaf.C[0](0, 0) = 1.0;
    rep.blocks.push_back(leaf);
    return rep;
  }
  std::vector<Affine> level;
  for (Index i = 0; i < leaves; ++i) level.push_back(i < m ? Affine{0, packed(i, i)} : Affine{1.0, -1});
  Index next_aux = tri;
  while (level.size() > 1) {
    std::vector<Affine> up;
    const bool root = level.size() == 2;
    for (std::size_t i = 0; i < level.size(); i += 2) {
      const Affine parent = root ? Affine{1.0, -1} : Affine{0, next_aux++};
      // [[left, parent], [parent, right]] >= 0
      CriterionBlock node;
      node.size = 2;
      node.A = [](const MatrixXd&) { return MatrixXd::Zero(2, 2); };
      node.B = MatrixXd::Zero(2, 2);
      node.D = MatrixXd::Zero(2, 2);
      node.C.assign(std::size_t(aux), MatrixXd::Zero(2, 2));
      auto place = [&](const Affine& v, Index r, Index c) {
        node.B(r, c) += v.z;
        if (c != r) node.B(c, r) += v.z;
        if (v.u >= 0) {
          node.C[std::size_t(v.u)](r, c) += 1.0;
          if (c != r) node.C[std::size_t(v.u)](c, r) += 1.0;
        }
      };
      place(level[i], 0, 0);
      place(level[i + 1], 1, 1);
      place(parent, 0, 1);
      rep.blocks.push_back(node);
      up.push_back(parent);
    }
    level = std::move(up);
  }
  return rep;
}

namespace {

/// max z over (z, u, r) with A_i(sum r_s M_s) + B_i z + C_i(u) + D_i >= 0.
/// With fixed = true there is a single M and no r.
struct PhiSdp {
  sdp::BlockSdpProblem sdp;
  Index r_block = -1;
  Index z_block = 0;
};

PhiSdp phi_sdp(const CriterionRep& crit, const std::vector<MatrixXd>& infos, bool fixed) {
  crit.validate();
  PhiSdp out;
  auto& p = out.sdp;
  p.set_sense(sdp::Sense::Max);
  const Index s = Index(infos.size());
  if (!fixed) out.r_block = p.add_nonneg_block(s);
  out.z_block = p.add_free_block(1);
  const Index u_block = crit.num_aux > 0 ? p.add_free_block(crit.num_aux) : -1;
  p.add_objective_entry(out.z_block, 0, 0, 1.0);
  if (!fixed) {
    const Index r = p.add_constraint(1.0);
    for (Index i = 0; i < s; ++i) p.add_entry(r, out.r_block, i, i, 1.0);
  }
  for (const auto& blk : crit.blocks) {
    std::vector<MatrixXd> mapped;
    for (const auto& M : infos) mapped.push_back(blk.A(M));
    const Index slack = p.add_psd_block(blk.size);
    for (Index a = 0; a < blk.size; ++a) {
      for (Index b = a; b < blk.size; ++b) {
        double rhs = -blk.D(a, b);
        const Index row = p.add_constraint(0.0);
        if (fixed)
          rhs -= mapped[0](a, b);
        else
          for (Index i = 0; i < s; ++i)
            if (mapped[std::size_t(i)](a, b) != 0.0) p.add_entry(row, out.r_block, i, i, mapped[std::size_t(i)](a, b));
        if (blk.B(a, b) != 0.0) p.add_entry(row, out.z_block, 0, 0, blk.B(a, b));
        for (Index j = 0; j < Index(blk.C.size()); ++j)
          if (blk.C[std::size_t(j)](a, b) != 0.0) p.add_entry(row, u_block, j, j, blk.C[std::size_t(j)](a, b));
        p.add_entry(row, slack, a, b, a == b ? -1.0 : -0.5);
        p.set_rhs(row, rhs);
      }
    }
  }
  return out;
}

}  // namespace

double criterion_value(const CriterionRep& crit, const MatrixXd& X, const sdp::SolverConfig& cfg) {
  if (X.rows() != crit.dim || X.cols() != crit.dim) throw InvalidArgument("matrix does not match criterion dimension");
  const auto ps = phi_sdp(crit, {X}, true);
  const auto sol = sdp::solve(ps.sdp, cfg);
  require_usable(sol, "criterion value");
  return sol.X[std::size_t(ps.z_block)](0);
}

WeightResult design_weights(const std::vector<double>& support, const FisherModel& model, const CriterionRep& crit,
                            const sdp::SolverConfig& cfg) {
  if (support.empty()) throw InvalidArgument("design_weights needs at least one support point");
  if (model.dim() != crit.dim) throw InvalidArgument("criterion dimension does not match the model");
  std::vector<MatrixXd> infos;
  for (double t : support) infos.push_back(model.information(t));
  const auto ps = phi_sdp(crit, infos, false);
  WeightResult out;
  out.solution = sdp::solve(ps.sdp, cfg);
  require_usable(out.solution, "design weights");
  VectorXd r = out.solution.X[std::size_t(ps.r_block)];
  for (Index i = 0; i < r.size(); ++i)
    if (r(i) < 1e-8) r(i) = 0.0;
  if (r.sum() <= 0.0) throw Error("design weights vanished after pruning");
  out.weights = r / r.sum();
  out.value = out.solution.X[std::size_t(ps.z_block)](0);
  return out;
}

namespace {

Index policy_degree(const Poly& p, const SupportOptions& opt) {
  return opt.degree_policy == DegreePolicy::Adaptive ? p.degree() : cheb::effective_degree(p, opt.tol);
}

FisherModel sampled_model(const FisherModel& model, const SupportOptions& opt) {
  model.validate();
  if (opt.basis_points <= 0) return model;
  if (opt.basis_points < 2) throw InvalidArgument("interpolated basis needs at least two points");
  FisherModel out = model;
  const Grid g = Grid::second_kind(opt.basis_points - 1);
  for (auto& f : out.basis) {
    const Poly p = Poly::from_function(g, f);
    f = [p](double t) { return p(t); };
  }
  return out;
}

Index weight_degree(const FisherModel& model, const SupportOptions& opt) {
  if (!model.weight) return 0;
  try {
    return policy_degree(cheb::adaptive_interpolate<double>(model.weight, opt.tol).interpolant, opt);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(std::string("noise weight: ") + e.what(), e.residual());
  }
}

}  // namespace

Index support_degree(const FisherModel& model, const SupportOptions& opt) {
  Index d = 0;
  if (opt.basis_points > 0) {
    d = 2 * (opt.basis_points - 1) + weight_degree(model, opt);
  } else {
    for (Index i = 0; i < model.dim(); ++i) {
      for (Index j = i; j < model.dim(); ++j) {
        const auto& fi = model.basis[std::size_t(i)];
        const auto& fj = model.basis[std::size_t(j)];
        auto product = [&](double t) { return fi(t) * fj(t) * model.noise_weight(t); };
        try {
          d = std::max(d, policy_degree(cheb::adaptive_interpolate<double>(product, opt.tol).interpolant, opt));
        } catch (const ConvergenceError& e) {
          throw ConvergenceError("product f_" + std::to_string(i) + " f_" + std::to_string(j) + ": " + e.what(),
                                 e.residual());
        }
      }
    }
  }
  if (d > opt.max_degree) throw InvalidArgument("support polynomial degree " + std::to_string(d) + " exceeds the cap");
  return d;
}

namespace {

SupportProblem support_frame(const FisherModel& model, const CriterionRep& crit, const SupportOptions& opt) {
  SupportProblem out;
  out.model = sampled_model(model, opt);
  out.criterion = crit;
  out.grid = Grid::first_kind(support_degree(out.model, opt));
  out.sdp.set_sense(sdp::Sense::Min);
  out.y_block = out.sdp.add_free_block(1);
  out.sdp.add_objective_entry(out.y_block, 0, 0, 1.0);
  for (Index l = 0; l < out.grid.size(); ++l) {
    const MatrixXd M = out.model.information(out.grid[l]);
    std::vector<MatrixXd> row;
    for (const auto& blk : crit.blocks) row.push_back(blk.A(M) + blk.D);
    out.bracket.push_back(std::move(row));
  }
  return out;
}

void attach_pi_rows(SupportProblem& out) {
  out.cone = attach_interval_cone(out.sdp, IntervalCone(out.grid), out.pi_rows);
}

}  // namespace

SupportProblem eoptimal_support_sdp(const FisherModel& model, const SupportOptions& opt) {
  SupportProblem out = support_frame(model, e_optimality(model.dim()), opt);
  auto& p = out.sdp;
  const Index m = out.model.dim();
  const Index W = p.add_psd_block(m);
  out.w_blocks.push_back(W);
  const Index tr = p.add_constraint(1.0);
  for (Index a = 0; a < m; ++a) p.add_entry(tr, W, a, a, 1.0);
  // pi_l = y - W . M_l, written as SOS_l - y + W . M_l = 0
  for (Index l = 0; l < out.grid.size(); ++l) {
    const double t = out.grid[l];
    const Index r = p.add_constraint(0.0);
    p.add_entry(r, out.y_block, 0, 0, -1.0);
    const double w = out.model.noise_weight(t);
    const VectorXd u = std::sqrt(w) * out.model.features(t);
    if (u.cwiseAbs().maxCoeff() > 0.0) p.add_rank_one(r, W, u, 1.0);
    out.pi_rows.push_back(r);
  }
  attach_pi_rows(out);
  return out;
}

SupportProblem general_support_sdp(const FisherModel& model, const CriterionRep& crit, const SupportOptions& opt) {
  crit.validate();
  if (model.dim() != crit.dim) throw InvalidArgument("criterion dimension does not match the model");
  SupportProblem out = support_frame(model, crit, opt);
  auto& p = out.sdp;
  for (const auto& blk : crit.blocks) out.w_blocks.push_back(p.add_psd_block(blk.size));
  auto add_matrix = [&](Index row, Index blk, const MatrixXd& G) {
    for (Index a = 0; a < G.rows(); ++a)
      for (Index b = a; b < G.cols(); ++b)
        if (G(a, b) != 0.0) p.add_entry(row, blk, a, b, G(a, b));
  };
  const Index rb = p.add_constraint(-1.0);
  for (std::size_t i = 0; i < crit.blocks.size(); ++i) add_matrix(rb, out.w_blocks[i], crit.blocks[i].B);
  for (Index j = 0; j < crit.num_aux; ++j) {
    const Index rc = p.add_constraint(0.0);
    for (std::size_t i = 0; i < crit.blocks.size(); ++i)
      if (!crit.blocks[i].C.empty()) add_matrix(rc, out.w_blocks[i], crit.blocks[i].C[std::size_t(j)]);
  }
  for (Index l = 0; l < out.grid.size(); ++l) {
    const Index r = p.add_constraint(0.0);
    p.add_entry(r, out.y_block, 0, 0, -1.0);
    for (std::size_t i = 0; i < crit.blocks.size(); ++i) add_matrix(r, out.w_blocks[i], out.bracket[std::size_t(l)][i]);
    out.pi_rows.push_back(r);
  }
  attach_pi_rows(out);
  return out;
}

Poly support_polynomial(const SupportProblem& prob, const sdp::SdpSolution& sol) {
  require_usable(sol, "support polynomial");
  const double y = sol.X[std::size_t(prob.y_block)](0);
  VectorXd v(prob.grid.size());
  for (Index l = 0; l < v.size(); ++l) {
    double s = y;
    for (std::size_t i = 0; i < prob.w_blocks.size(); ++i)
      s -= prob.bracket[std::size_t(l)][i].cwiseProduct(sol.X[std::size_t(prob.w_blocks[i])]).sum();
    v(l) = s;
  }
  return Poly(prob.grid, std::move(v));
}

DesignResult design_from_solution(const SupportProblem& prob, sdp::SdpSolution sol, const sdp::SolverConfig& cfg) {
  DesignResult out;
  out.degree = prob.grid.degree();
  out.solution = std::move(sol);
  require_usable(out.solution, "support SDP");
  out.bound = out.solution.X[std::size_t(prob.y_block)](0);
  out.pi = support_polynomial(prob, out.solution);
  const double scale = out.pi.values().cwiseAbs().maxCoeff();
  if (scale <= 1e-8 * std::max(1.0, std::abs(out.bound))) {
    out.degenerate = true;
    out.message = "pi vanishes identically; every point of [-1, 1] is a root";
    return out;
  }
  const auto roots = contact_points(out.pi);
  const auto wr = design_weights(roots, prob.model, prob.criterion, cfg);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (wr.weights(Index(i)) <= 0.0) continue;
    out.support.push_back(roots[i]);
  }
  out.weights.resize(Index(out.support.size()));
  Index k = 0;
  for (std::size_t i = 0; i < roots.size(); ++i)
    if (wr.weights(Index(i)) > 0.0) out.weights(k++) = wr.weights(Index(i));
  out.criterion_value = wr.value;
  return out;
}

DesignResult optimal_design(const FisherModel& model, const CriterionRep& crit, const SupportOptions& opt,
                            const sdp::SolverConfig& cfg) {
  const SupportProblem prob = general_support_sdp(model, crit, opt);
  return design_from_solution(prob, sdp::solve(prob.sdp, cfg), cfg);
}

DesignResult eoptimal_design(const FisherModel& model, const SupportOptions& opt, const sdp::SolverConfig& cfg) {
  const SupportProblem prob = eoptimal_support_sdp(model, opt);
  return design_from_solution(prob, sdp::solve(prob.sdp, cfg), cfg);
}

namespace {

double probe_error(const Sampler& g, const Poly& p, Index probe_points) {
  double err = 0;
  for (Index i = 0; i < probe_points; ++i) {
    const double t = -1.0 + 2.0 * double(i) / double(probe_points - 1);
    err = std::max(err, std::abs(g(t) - p(t)));
  }
  return err;
}

}  // namespace

double equispaced_interpolation_error(const Sampler& g, Index n_points, Index probe_points) {
  if (n_points < 2 || probe_points < 2) throw InvalidArgument("need at least two nodes and two probe points");
  VectorXd x(n_points);
  for (Index i = 0; i < n_points; ++i) x(i) = 1.0 - 2.0 * double(i) / double(n_points - 1);
  return probe_error(g, Poly::from_function(Grid::general(x), g), probe_points);
}

double chebyshev_interpolation_error(const Sampler& g, Index n_points, Index probe_points) {
  if (n_points < 2 || probe_points < 2) throw InvalidArgument("need at least two nodes and two probe points");
  return probe_error(g, Poly::from_function(Grid::second_kind(n_points - 1), g), probe_points);
}

}  // namespace sosinterp::apps
