#include "sosinterp/sdp/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace sosinterp::sdp {

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::PrimalInfeasible: return "primal_infeasible";
    case Status::DualInfeasible: return "dual_infeasible";
    case Status::SlowProgress: return "slow_progress";
    case Status::IterLimit: return "iter_limit";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (!(tol_gap > 0) || !(tol_feas > 0)) throw InvalidArgument("solver tolerances must be positive");
  if (max_iter < 1) throw InvalidArgument("max_iter must be positive");
  if (!(step_fraction > 0 && step_fraction < 1)) throw InvalidArgument("step fraction must lie in (0, 1)");
  if (stall_window < 1 || !(stall_reduction > 0 && stall_reduction < 1)) throw InvalidArgument("bad stall settings");
}

Residuals residuals(const BlockSdpProblem& p, const BlockValues& X, const VectorXd& y, const BlockValues& Z) {
  const VectorXd b = p.rhs();
  const BlockValues C = objective_values(p);
  const VectorXd rp = apply_constraints(p, X) - b;
  BlockValues rd = apply_adjoint(p, y);
  for (std::size_t k = 0; k < rd.size(); ++k) rd[k] += Z[k] - C[k];
  const double cx = inner(C, X), by = b.dot(y);
  Residuals r;
  r.pinf = rp.norm() / (1 + b.norm());
  r.dinf = frobenius_norm(rd) / (1 + frobenius_norm(C));
  r.gap = std::abs(cx - by) / (1 + std::abs(cx) + std::abs(by));
  return r;
}

Residuals residuals(const BlockSdpProblem& p, const SdpSolution& sol) { return residuals(p, sol.X, sol.y, sol.Z); }

namespace {

using SpMat = Eigen::SparseMatrix<double>;

constexpr double kInfeasibilityRatio = 1e-8;

struct SparsePart {
  Index con;
  std::vector<SparseEntry> entries;
};

struct PsdBlock {
  Index block = 0;
  Index n = 0;
  MatrixXd U;  // rank-one vectors as rows
  VectorXd sigma;
  std::vector<Index> term_con;
  std::vector<SparsePart> sparse;
  MatrixXd C;
  double xi = 1, eta = 1;
};

struct Compiled {
  Index m = 0;
  std::vector<PsdBlock> psd;
  SpMat A_lp;  // m x n_lp
  VectorXd c_lp;
  VectorXd xi_lp, eta_lp;
  MatrixXd A_free;  // m x n_free
  VectorXd c_free;
  std::vector<std::pair<Index, Index>> lp_blocks, free_blocks;  // (block, offset)
  VectorXd b;
  double sign = 1;  // internal C = sign * C_user / c_scale
  double b_scale = 1, c_scale = 1;
  std::vector<Index> empty_rows;
};

double entry_norm_sq(const SparseEntry& e) { return (e.i == e.j ? 1.0 : 2.0) * e.value * e.value; }

Compiled compile(const BlockSdpProblem& p) {
  Compiled c;
  c.m = p.num_constraints();
  c.b = p.rhs();
  c.sign = p.sense() == Sense::Max ? -1.0 : 1.0;
  const auto& blocks = p.blocks();
  std::vector<Index> psd_index(blocks.size(), -1), offset(blocks.size(), 0);
  Index n_lp = 0, n_free = 0;
  for (Index k = 0; k < Index(blocks.size()); ++k) {
    switch (blocks[k].kind) {
      case BlockKind::PSD:
        psd_index[k] = Index(c.psd.size());
        c.psd.push_back(PsdBlock{});
        c.psd.back().block = k;
        c.psd.back().n = blocks[k].size;
        c.psd.back().C = MatrixXd::Zero(blocks[k].size, blocks[k].size);
        break;
      case BlockKind::Nonneg:
        offset[k] = n_lp;
        c.lp_blocks.push_back({k, n_lp});
        n_lp += blocks[k].size;
        break;
      case BlockKind::Free:
        offset[k] = n_free;
        c.free_blocks.push_back({k, n_free});
        n_free += blocks[k].size;
        break;
    }
  }
  c.c_lp = VectorXd::Zero(n_lp);
  c.c_free = VectorXd::Zero(n_free);
  c.A_free = MatrixXd::Zero(c.m, n_free);
  std::vector<Eigen::Triplet<double>> lp_trip;
  // per-constraint, per-block squared norms for the starting point
  std::vector<std::vector<double>> psd_norm(c.psd.size(), std::vector<double>(c.m, 0.0));
  std::vector<std::vector<int>> rank_count(c.psd.size());
  std::vector<Index> term_total(c.psd.size(), 0);
  for (const auto& con : p.constraints())
    for (const auto& r : con.rank_one) ++term_total[psd_index[r.block]];
  for (std::size_t q = 0; q < c.psd.size(); ++q) {
    c.psd[q].U.resize(term_total[q], c.psd[q].n);
    c.psd[q].sigma.resize(term_total[q]);
    c.psd[q].term_con.reserve(term_total[q]);
  }
  for (Index j = 0; j < c.m; ++j) {
    const auto& con = p.constraints()[j];
    bool empty = true;
    for (const auto& e : con.entries) {
      if (e.value != 0.0) empty = false;
      switch (blocks[e.block].kind) {
        case BlockKind::PSD: {
          auto& blk = c.psd[psd_index[e.block]];
          if (blk.sparse.empty() || blk.sparse.back().con != j) blk.sparse.push_back({j, {}});
          blk.sparse.back().entries.push_back(e);
          psd_norm[psd_index[e.block]][j] += entry_norm_sq(e);
          break;
        }
        case BlockKind::Nonneg: lp_trip.emplace_back(j, offset[e.block] + e.i, e.value); break;
        case BlockKind::Free: c.A_free(j, offset[e.block] + e.i) += e.value; break;
      }
    }
    for (const auto& r : con.rank_one) {
      auto& blk = c.psd[psd_index[r.block]];
      const Index t = Index(blk.term_con.size());
      blk.U.row(t) = r.u.transpose();
      blk.sigma(t) = r.scale;
      blk.term_con.push_back(j);
      const double nr = std::abs(r.scale) * r.u.squaredNorm();
      psd_norm[psd_index[r.block]][j] += nr * nr;
      if (r.scale != 0.0 && r.u.squaredNorm() > 0) empty = false;
    }
    if (empty) c.empty_rows.push_back(j);
  }
  c.A_lp.resize(c.m, n_lp);
  c.A_lp.setFromTriplets(lp_trip.begin(), lp_trip.end());
  for (const auto& e : p.objective()) {
    const double v = c.sign * e.value;
    switch (blocks[e.block].kind) {
      case BlockKind::PSD: {
        auto& C = c.psd[psd_index[e.block]].C;
        C(e.i, e.j) += v;
        if (e.i != e.j) C(e.j, e.i) += v;
        break;
      }
      case BlockKind::Nonneg: c.c_lp(offset[e.block] + e.i) += v; break;
      case BlockKind::Free: c.c_free(offset[e.block] + e.i) += v; break;
    }
  }
  // normalize b and C so the iterates are covariant under scaling of the data
  double c_sq = c.c_lp.squaredNorm() + c.c_free.squaredNorm();
  for (const auto& blk : c.psd) c_sq += blk.C.squaredNorm();
  c.b_scale = std::max(1.0, c.b.norm());
  c.c_scale = std::max(1.0, std::sqrt(c_sq));
  c.b /= c.b_scale;
  c.c_lp /= c.c_scale;
  c.c_free /= c.c_scale;
  for (auto& blk : c.psd) blk.C /= c.c_scale;
  // starting point scales, per block
  for (std::size_t q = 0; q < c.psd.size(); ++q) {
    auto& blk = c.psd[q];
    const double n = double(blk.n);
    double ratio = 0, normA = 0;
    for (Index j = 0; j < c.m; ++j) {
      const double a = std::sqrt(psd_norm[q][j]);
      ratio = std::max(ratio, (1 + std::abs(c.b(j))) / (1 + a));
      normA = std::max(normA, a);
    }
    blk.xi = std::max({10.0, std::sqrt(n), n * ratio});
    blk.eta = std::max({10.0, std::sqrt(n), normA, blk.C.norm()});
  }
  c.xi_lp.resize(n_lp);
  c.eta_lp.resize(n_lp);
  const SpMat At = c.A_lp.transpose();
  for (std::size_t q = 0; q < c.lp_blocks.size(); ++q) {
    const Index k = c.lp_blocks[q].first, off = c.lp_blocks[q].second, n = blocks[k].size;
    VectorXd rownorm = VectorXd::Zero(c.m);
    for (Index col = off; col < off + n; ++col)
      for (SpMat::InnerIterator it(c.A_lp, col); it; ++it) rownorm(it.row()) += it.value() * it.value();
    double ratio = 0, normA = 0;
    for (Index j = 0; j < c.m; ++j) {
      const double a = std::sqrt(rownorm(j));
      ratio = std::max(ratio, (1 + std::abs(c.b(j))) / (1 + a));
      normA = std::max(normA, a);
    }
    const double xi = std::max({10.0, std::sqrt(double(n)), double(n) * ratio});
    const double eta = std::max({10.0, std::sqrt(double(n)), normA, c.c_lp.segment(off, n).norm()});
    c.xi_lp.segment(off, n).setConstant(xi);
    c.eta_lp.segment(off, n).setConstant(eta);
  }
  return c;
}

struct Iterate {
  std::vector<MatrixXd> X, Z;  // PSD blocks
  VectorXd x_lp, z_lp, x_free, y;
};

VectorXd op_A(const Compiled& c, const std::vector<MatrixXd>& X, const VectorXd& x_lp) {
  VectorXd out = VectorXd::Zero(c.m);
  for (std::size_t q = 0; q < c.psd.size(); ++q) {
    const auto& blk = c.psd[q];
    if (blk.U.rows() > 0) {
      const VectorXd v = (blk.U * X[q]).cwiseProduct(blk.U).rowwise().sum().cwiseProduct(blk.sigma);
      for (Index t = 0; t < v.size(); ++t) out(blk.term_con[t]) += v(t);
    }
    for (const auto& sp : blk.sparse) {
      double s = 0;
      for (const auto& e : sp.entries) s += e.value * (e.i == e.j ? X[q](e.i, e.i) : X[q](e.i, e.j) + X[q](e.j, e.i));
      out(sp.con) += s;
    }
  }
  if (x_lp.size()) out += c.A_lp * x_lp;
  return out;
}

MatrixXd op_AT_block(const PsdBlock& blk, const VectorXd& y) {
  MatrixXd S = MatrixXd::Zero(blk.n, blk.n);
  if (blk.U.rows() > 0) {
    VectorXd w(blk.U.rows());
    for (Index t = 0; t < w.size(); ++t) w(t) = blk.sigma(t) * y(blk.term_con[t]);
    S.noalias() = blk.U.transpose() * w.asDiagonal() * blk.U;
  }
  for (const auto& sp : blk.sparse) {
    const double yj = y(sp.con);
    for (const auto& e : sp.entries) {
      S(e.i, e.j) += yj * e.value;
      if (e.i != e.j) S(e.j, e.i) += yj * e.value;
    }
  }
  return S;
}

MatrixXd sym(const MatrixXd& A) { return 0.5 * (A + A.transpose()); }

/// Largest alpha with X + alpha dX >= 0 (infinity if unbounded); nullopt when X is not PD.
std::optional<double> max_step_psd(const MatrixXd& X, const MatrixXd& dX) {
  Eigen::LLT<MatrixXd> llt(X);
  if (llt.info() != Eigen::Success) return std::nullopt;
  MatrixXd W = llt.matrixL().solve(dX);
  W = llt.matrixL().solve(W.transpose().eval()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(W), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  return lmin < 0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

double max_step_lp(const VectorXd& x, const VectorXd& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < x.size(); ++i)
    if (dx(i) < 0) a = std::min(a, -x(i) / dx(i));
  return a;
}

/// Schur complement M_jk = <A_j, X A_k Z^-1> summed over cone blocks.
MatrixXd schur(const Compiled& c, const Iterate& it, const std::vector<MatrixXd>& Zinv) {
  MatrixXd M = MatrixXd::Zero(c.m, c.m);
  for (std::size_t q = 0; q < c.psd.size(); ++q) {
    const auto& blk = c.psd[q];
    const MatrixXd& X = it.X[q];
    const MatrixXd& Zi = Zinv[q];
    const Index T = blk.U.rows();
    if (T > 0) {
      // rank-one fast path: (U X U^T) o (U Z^-1 U^T) o sigma sigma^T, scattered by constraint.
      // Both Gram factors come from Cholesky factors so they stay PSD when X or Z is near singular.
      MatrixXd GX, GZ;
      Eigen::LLT<MatrixXd> lx(X), lz(it.Z[q]);
      if (lx.info() == Eigen::Success) {
        const MatrixXd F = blk.U * lx.matrixL();
        GX = F * F.transpose();
      } else {
        GX = blk.U * X * blk.U.transpose();
      }
      if (lz.info() == Eigen::Success) {
        const MatrixXd V = lz.matrixL().solve(blk.U.transpose());
        GZ = V.transpose() * V;
      } else {
        GZ = blk.U * Zi * blk.U.transpose();
      }
      MatrixXd H = GX.cwiseProduct(GZ);
      H = blk.sigma.asDiagonal() * H * blk.sigma.asDiagonal();
      for (Index r = 0; r < T; ++r) {
        const Index jr = blk.term_con[r];
        for (Index s = 0; s < T; ++s) M(jr, blk.term_con[s]) += H(r, s);
      }
    }
    for (const auto& spk : blk.sparse) {
      // T_k = X S_k Z^-1 built column-pair by column-pair
      MatrixXd Tk = MatrixXd::Zero(blk.n, blk.n);
      for (const auto& e : spk.entries) {
        Tk.noalias() += e.value * X.col(e.i) * Zi.row(e.j);
        if (e.i != e.j) Tk.noalias() += e.value * X.col(e.j) * Zi.row(e.i);
      }
      const Index k = spk.con;
      for (const auto& spj : blk.sparse) {
        double s = 0;
        for (const auto& e : spj.entries) s += e.value * (e.i == e.j ? Tk(e.i, e.i) : Tk(e.i, e.j) + Tk(e.j, e.i));
        M(spj.con, k) += s;
      }
      if (T > 0) {
        const VectorXd v = (blk.U * Tk).cwiseProduct(blk.U).rowwise().sum().cwiseProduct(blk.sigma);
        for (Index r = 0; r < T; ++r) {
          M(blk.term_con[r], k) += v(r);
          M(k, blk.term_con[r]) += v(r);
        }
      }
    }
  }
  if (it.x_lp.size()) {
    const VectorXd d = it.x_lp.cwiseQuotient(it.z_lp);
    const SpMat AD = c.A_lp * d.asDiagonal();
    M += MatrixXd(AD * c.A_lp.transpose());
  }
  for (Index j : c.empty_rows) M(j, j) = 1.0;
  return sym(M);
}

/// Factorization of the augmented system [[M, A_f], [A_f^T, 0]], symmetrically
/// equilibrated (unit diagonal of M, unit-norm free columns), with two steps of
/// iterative refinement against the unshifted matrix.
class NewtonSystem {
 public:
  bool factor(const MatrixXd& M, const MatrixXd& A_free, std::string& why) {
    const Index m = M.rows(), nf = A_free.cols();
    scale_.resize(m + nf);
    for (Index i = 0; i < m; ++i) scale_(i) = M(i, i) > 0 ? 1.0 / std::sqrt(M(i, i)) : 1.0;
    for (Index k = 0; k < nf; ++k) {
      const double nrm = scale_.head(m).cwiseProduct(A_free.col(k)).norm();
      scale_(m + k) = nrm > 0 ? 1.0 / nrm : 1.0;
    }
    K_.resize(m + nf, m + nf);
    K_.topLeftCorner(m, m) = M;
    K_.topRightCorner(m, nf) = A_free;
    K_.bottomLeftCorner(nf, m) = A_free.transpose();
    K_.bottomRightCorner(nf, nf).setZero();
    K_ = scale_.asDiagonal() * K_ * scale_.asDiagonal();
    const double base = 1 + K_.topLeftCorner(m, m).diagonal().cwiseAbs().maxCoeff();
    for (int attempt = 0; attempt <= 4; ++attempt) {
      MatrixXd Ks = K_;
      if (attempt > 0) Ks.topLeftCorner(m, m).diagonal().array() += 1e-12 * std::pow(10.0, attempt - 1) * base;
      if (nf == 0) {
        llt_.compute(Ks);
        if (llt_.info() == Eigen::Success) return true;
        continue;
      }
      lu_.compute(Ks);
      const double rc = lu_.rcond();
      if (std::isfinite(rc) && rc > 1e-15 * std::pow(10.0, -attempt)) {
        use_lu_ = true;
        return true;
      }
    }
    why = "Schur complement factorization failed after regularization";
    return false;
  }

  void solve(const VectorXd& r, const VectorXd& r_free, VectorXd& dy, VectorXd& dx_free) const {
    const Index m = r.size();
    VectorXd rhs(m + r_free.size());
    rhs << r, r_free;
    rhs = scale_.cwiseProduct(rhs);
    VectorXd sol = apply_inverse(rhs);
    for (int k = 0; k < 2; ++k) sol += apply_inverse(rhs - K_ * sol);
    sol = scale_.cwiseProduct(sol);
    dy = sol.head(m);
    dx_free = sol.tail(r_free.size());
  }

 private:
  VectorXd apply_inverse(const VectorXd& v) const { return use_lu_ ? VectorXd(lu_.solve(v)) : VectorXd(llt_.solve(v)); }

  VectorXd scale_;
  MatrixXd K_;
  Eigen::LLT<MatrixXd> llt_;
  Eigen::PartialPivLU<MatrixXd> lu_;
  bool use_lu_ = false;
};

struct Direction {
  std::vector<MatrixXd> dX, dZ;
  VectorXd dx_lp, dz_lp, dx_free, dy;
};

struct State {
  VectorXd rp, r_free;  // b - A(X) - A_f x_f ; c_f - A_f^T y
  std::vector<MatrixXd> Rd;  // C - A^T y - Z per PSD block
  VectorXd rd_lp;
};

State compute_state(const Compiled& c, const Iterate& it) {
  State s;
  s.rp = c.b - op_A(c, it.X, it.x_lp);
  if (it.x_free.size()) s.rp -= c.A_free * it.x_free;
  s.r_free = c.c_free - c.A_free.transpose() * it.y;
  for (std::size_t q = 0; q < c.psd.size(); ++q) s.Rd.push_back(c.psd[q].C - op_AT_block(c.psd[q], it.y) - it.Z[q]);
  s.rd_lp = c.c_lp - c.A_lp.transpose() * it.y - it.z_lp;
  return s;
}

Direction solve_direction(const Compiled& c, const Iterate& it, const State& st, const std::vector<MatrixXd>& Zinv,
                          const NewtonSystem& sys, const std::vector<MatrixXd>& H, const VectorXd& h_lp) {
  Direction d;
  std::vector<MatrixXd> G(c.psd.size());
  for (std::size_t q = 0; q < c.psd.size(); ++q) G[q] = H[q] - it.X[q] * st.Rd[q] * Zinv[q];
  VectorXd g_lp;
  if (it.x_lp.size()) g_lp = h_lp - it.x_lp.cwiseProduct(st.rd_lp).cwiseQuotient(it.z_lp);
  const VectorXd r = st.rp - op_A(c, G, g_lp);
  sys.solve(r, st.r_free, d.dy, d.dx_free);
  for (std::size_t q = 0; q < c.psd.size(); ++q) {
    d.dZ.push_back(st.Rd[q] - op_AT_block(c.psd[q], d.dy));
    d.dX.push_back(sym(H[q] - it.X[q] * d.dZ[q] * Zinv[q]));
  }
  if (it.x_lp.size()) {
    d.dz_lp = st.rd_lp - c.A_lp.transpose() * d.dy;
    d.dx_lp = h_lp - it.x_lp.cwiseProduct(d.dz_lp).cwiseQuotient(it.z_lp);
  }
  return d;
}

/// Newton direction plus one refinement pass on the primal equations: near the
/// boundary Z^-1 is huge and A(dX) misses rp by far more than the Schur residual.
Direction direction(const Compiled& c, const Iterate& it, const State& st, const std::vector<MatrixXd>& Zinv,
                    const NewtonSystem& sys, const std::vector<MatrixXd>& H, const VectorXd& h_lp) {
  Direction d = solve_direction(c, it, st, Zinv, sys, H, h_lp);
  State err;
  err.rp = st.rp - op_A(c, d.dX, d.dx_lp);
  if (it.x_free.size()) err.rp -= c.A_free * d.dx_free;
  if (!(err.rp.norm() > 1e-14 * st.rp.norm())) return d;
  err.r_free = VectorXd::Zero(st.r_free.size());
  for (const auto& R : st.Rd) err.Rd.push_back(MatrixXd::Zero(R.rows(), R.cols()));
  err.rd_lp = VectorXd::Zero(st.rd_lp.size());
  std::vector<MatrixXd> H0;
  for (const auto& X : it.X) H0.push_back(MatrixXd::Zero(X.rows(), X.cols()));
  const Direction e = solve_direction(c, it, err, Zinv, sys, H0, VectorXd::Zero(h_lp.size()));
  VectorXd after = err.rp - op_A(c, e.dX, e.dx_lp);
  if (it.x_free.size()) after -= c.A_free * e.dx_free;
  if (!(after.norm() < err.rp.norm())) return d;
  for (std::size_t q = 0; q < d.dX.size(); ++q) {
    d.dX[q] += e.dX[q];
    d.dZ[q] += e.dZ[q];
  }
  if (it.x_lp.size()) {
    d.dx_lp += e.dx_lp;
    d.dz_lp += e.dz_lp;
  }
  if (it.x_free.size()) d.dx_free += e.dx_free;
  d.dy += e.dy;
  return d;
}

struct Steps {
  double primal = 0, dual = 0;
  bool ok = true;
};

Steps max_steps(const Iterate& it, const Direction& d) {
  Steps s;
  s.primal = s.dual = std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < it.X.size(); ++q) {
    const auto ap = max_step_psd(it.X[q], d.dX[q]);
    const auto ad = max_step_psd(it.Z[q], d.dZ[q]);
    if (!ap || !ad) {
      s.ok = false;
      return s;
    }
    s.primal = std::min(s.primal, *ap);
    s.dual = std::min(s.dual, *ad);
  }
  if (it.x_lp.size()) {
    s.primal = std::min(s.primal, max_step_lp(it.x_lp, d.dx_lp));
    s.dual = std::min(s.dual, max_step_lp(it.z_lp, d.dz_lp));
  }
  return s;
}

double complementarity(const Iterate& it) {
  double s = 0;
  for (std::size_t q = 0; q < it.X.size(); ++q) s += it.X[q].cwiseProduct(it.Z[q]).sum();
  if (it.x_lp.size()) s += it.x_lp.dot(it.z_lp);
  return s;
}

SdpSolution export_solution(const BlockSdpProblem& p, const Compiled& c, const Iterate& it) {
  SdpSolution sol;
  sol.X = p.zero_values();
  sol.Z = p.zero_values();
  const double zs = c.sign * c.c_scale;
  for (std::size_t q = 0; q < c.psd.size(); ++q) {
    sol.X[c.psd[q].block] = c.b_scale * it.X[q];
    sol.Z[c.psd[q].block] = zs * it.Z[q];
  }
  for (const auto& [k, off] : c.lp_blocks) {
    const Index n = p.blocks()[k].size;
    sol.X[k] = c.b_scale * it.x_lp.segment(off, n);
    sol.Z[k] = zs * it.z_lp.segment(off, n);
  }
  for (const auto& [k, off] : c.free_blocks) sol.X[k] = c.b_scale * it.x_free.segment(off, p.blocks()[k].size);
  sol.y = zs * it.y;
  const BlockValues C = objective_values(p);
  sol.primal_objective = inner(C, sol.X);
  sol.dual_objective = p.rhs().dot(sol.y);
  return sol;
}

}  // namespace

SdpSolution solve(const BlockSdpProblem& p, const SolverConfig& cfg) {
  cfg.validate();
  p.validate();
  const Compiled c = compile(p);
  // residuals are measured in the caller's scaling
  const double sb = c.b_scale, sc = c.c_scale;
  const double norm_b = sb * c.b.norm();
  double norm_C = c.c_lp.squaredNorm() + c.c_free.squaredNorm();
  for (const auto& blk : c.psd) norm_C += blk.C.squaredNorm();
  norm_C = sc * std::sqrt(norm_C);

  Iterate it;
  double nu = 0;
  for (const auto& blk : c.psd) {
    it.X.push_back(blk.xi * MatrixXd::Identity(blk.n, blk.n));
    it.Z.push_back(blk.eta * MatrixXd::Identity(blk.n, blk.n));
    nu += double(blk.n);
  }
  it.x_lp = c.xi_lp;
  it.z_lp = c.eta_lp;
  nu += double(it.x_lp.size());
  it.x_free = VectorXd::Zero(c.A_free.cols());
  it.y = VectorXd::Zero(c.m);
  if (nu == 0) nu = 1;

  for (Index j : c.empty_rows) {
    if (c.b(j) != 0.0) {
      SdpSolution sol = export_solution(p, c, it);
      std::ostringstream os;
      os << "constraint " << j << " has no coefficients but right-hand side " << c.b(j);
      sol.status = Status::PrimalInfeasible;
      sol.message = os.str();
      sol.residuals = residuals(p, sol);
      return sol;
    }
  }


  std::vector<IterationRecord> trace;
  std::vector<double> merits, mus;
  std::optional<Iterate> best;
  double best_merit = std::numeric_limits<double>::infinity();
  Residuals best_res;
  Status status = Status::IterLimit;
  std::string message;
  int iter = 0;
  double last_sigma = 0, last_ap = 0, last_ad = 0;

  auto meets = [&](const Residuals& r) { return r.pinf <= cfg.tol_feas && r.dinf <= cfg.tol_feas && r.gap <= cfg.tol_gap; };

  for (;; ++iter) {
    const State st = compute_state(c, it);
    double cx = it.x_free.dot(c.c_free) + c.c_lp.dot(it.x_lp);
    for (std::size_t q = 0; q < c.psd.size(); ++q) cx += c.psd[q].C.cwiseProduct(it.X[q]).sum();
    const double cx_int = cx, by_int = c.b.dot(it.y);
    cx *= sb * sc;
    const double by = sb * sc * by_int;
    double rd_sq = st.r_free.squaredNorm() + st.rd_lp.squaredNorm();
    for (const auto& R : st.Rd) rd_sq += R.squaredNorm();
    Residuals res;
    res.pinf = sb * st.rp.norm() / (1 + norm_b);
    res.dinf = sc * std::sqrt(rd_sq) / (1 + norm_C);
    res.gap = std::abs(cx - by) / (1 + std::abs(cx) + std::abs(by));
    const double mu = complementarity(it) / nu;
    trace.push_back({iter, c.sign * cx, c.sign * by, res.pinf, res.dinf, res.gap, sb * sc * mu, last_ap, last_ad, last_sigma});
    const double merit = std::max({res.pinf, res.dinf, res.gap});
    merits.push_back(merit);
    if (merit < best_merit) {
      best_merit = merit;
      best = it;
      best_res = res;
    }

    if (!cfg.allow_stall_exit && meets(res)) {
      status = Status::Optimal;
      break;
    }
    // certificates of infeasibility along a diverging iterate
    {
      double ray_sq = (c.A_free.transpose() * it.y).squaredNorm();
      for (std::size_t q = 0; q < c.psd.size(); ++q) ray_sq += (op_AT_block(c.psd[q], it.y) + it.Z[q]).squaredNorm();
      if (it.x_lp.size()) ray_sq += (c.A_lp.transpose() * it.y + it.z_lp).squaredNorm();
      if (by_int > 0 && std::sqrt(ray_sq) <= kInfeasibilityRatio * by_int) {
        status = Status::PrimalInfeasible;
        message = "dual iterate is an improving ray: b^T y > 0 with A^T y + Z ~ 0";
        best = it;
        break;
      }
      VectorXd ax = op_A(c, it.X, it.x_lp);
      if (it.x_free.size()) ax += c.A_free * it.x_free;
      if (cx_int < 0 && ax.norm() <= kInfeasibilityRatio * std::abs(cx_int)) {
        status = Status::DualInfeasible;
        message = "primal iterate is an improving ray: <C,X> < 0 with A(X) ~ 0";
        best = it;
        break;
      }
    }
    mus.push_back(mu);
    const int w = cfg.stall_window;
    if (int(merits.size()) > w) {
      const std::size_t back = merits.size() - 1 - w;
      const double keep = 1 - cfg.stall_reduction;
      const bool merit_stalled = *std::min_element(merits.end() - w, merits.end()) > keep * merits[back];
      // while the tolerances are unmet, a shrinking mu still counts as progress
      const bool mu_stalled = meets(best_res) || *std::min_element(mus.end() - w, mus.end()) > keep * mus[back];
      if (merit_stalled && mu_stalled) {
        status = Status::SlowProgress;
        message = "merit reduced by less than the stall threshold over the stall window";
        break;
      }
    }
    if (iter >= cfg.max_iter) {
      status = Status::IterLimit;
      message = "iteration limit reached";
      break;
    }

    std::vector<MatrixXd> Zinv;
    bool numerically_ok = true;
    for (const auto& Z : it.Z) {
      Eigen::LLT<MatrixXd> llt(Z);
      if (llt.info() != Eigen::Success) {
        numerically_ok = false;
        break;
      }
      Zinv.push_back(sym(llt.solve(MatrixXd::Identity(Z.rows(), Z.cols()))));
    }
    NewtonSystem sys;
    if (numerically_ok && !sys.factor(schur(c, it, Zinv), c.A_free, message)) numerically_ok = false;
    if (!numerically_ok) {
      if (message.empty()) message = "dual slack lost definiteness";
      status = Status::IterLimit;
      break;
    }

    // predictor
    std::vector<MatrixXd> H(c.psd.size());
    for (std::size_t q = 0; q < c.psd.size(); ++q) H[q] = -it.X[q];
    VectorXd h_lp = -it.x_lp;
    const Direction pred = direction(c, it, st, Zinv, sys, H, h_lp);
    const Steps sp = max_steps(it, pred);
    if (!sp.ok) {
      status = Status::IterLimit;
      message = "iterate lost definiteness";
      break;
    }
    const double ap_aff = std::min(1.0, sp.primal), ad_aff = std::min(1.0, sp.dual);
    double mu_aff = 0;
    for (std::size_t q = 0; q < c.psd.size(); ++q)
      mu_aff += (it.X[q] + ap_aff * pred.dX[q]).cwiseProduct(it.Z[q] + ad_aff * pred.dZ[q]).sum();
    if (it.x_lp.size()) mu_aff += (it.x_lp + ap_aff * pred.dx_lp).dot(it.z_lp + ad_aff * pred.dz_lp);
    mu_aff /= nu;
    // centering exponent grows back toward 3 only when the affine step was long
    const double expon = std::max(1.0, 3.0 * std::pow(std::min(ap_aff, ad_aff), 2));
    const double sigma = mu > 0 ? std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, expon), 0.0, 1.0) : 0.0;

    // corrector
    for (std::size_t q = 0; q < c.psd.size(); ++q)
      H[q] = sigma * mu * Zinv[q] - it.X[q] - pred.dX[q] * pred.dZ[q] * Zinv[q];
    if (it.x_lp.size()) h_lp = (sigma * mu - pred.dx_lp.cwiseProduct(pred.dz_lp).array()).matrix().cwiseQuotient(it.z_lp) - it.x_lp;
    const Direction dir = direction(c, it, st, Zinv, sys, H, h_lp);
    const Steps sc = max_steps(it, dir);
    if (!sc.ok) {
      status = Status::IterLimit;
      message = "iterate lost definiteness";
      break;
    }
    const double tau = std::min(cfg.step_fraction, 0.9 + 0.09 * std::min(ap_aff, ad_aff));
    const double ap = std::min(1.0, tau * sc.primal);
    const double ad = std::min(1.0, tau * sc.dual);
    for (std::size_t q = 0; q < c.psd.size(); ++q) {
      it.X[q] = sym(it.X[q] + ap * dir.dX[q]);
      it.Z[q] = sym(it.Z[q] + ad * dir.dZ[q]);
    }
    if (it.x_lp.size()) {
      it.x_lp += ap * dir.dx_lp;
      it.z_lp += ad * dir.dz_lp;
    }
    if (it.x_free.size()) it.x_free += ap * dir.dx_free;
    it.y += ad * dir.dy;
    last_sigma = sigma;
    last_ap = ap;
    last_ad = ad;
  }

  const bool infeasible = status == Status::PrimalInfeasible || status == Status::DualInfeasible;
  const Iterate& out = (infeasible || !best) ? it : *best;
  SdpSolution sol = export_solution(p, c, out);
  sol.trace = std::move(trace);
  sol.iterations = iter;
  sol.residuals = residuals(p, sol);
  if (!infeasible) {
    if (meets(sol.residuals))
      status = Status::Optimal;
    else if (status == Status::Optimal)
      status = Status::SlowProgress;
    else if (status == Status::IterLimit && cfg.allow_stall_exit && message.find("limit") == std::string::npos)
      status = Status::SlowProgress;
  }
  sol.status = status;
  sol.message = message;
  return sol;
}

}  // namespace sosinterp::sdp
