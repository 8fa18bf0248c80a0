#include "sosinterp/sdp/problem.hpp"

#include <cmath>

namespace sosinterp::sdp {

const char* to_string(BlockKind k) {
  switch (k) {
    case BlockKind::PSD: return "psd";
    case BlockKind::Nonneg: return "nonneg";
    case BlockKind::Free: return "free";
  }
  return "?";
}

Index BlockSdpProblem::add_block(BlockKind kind, Index size) {
  if (size < 1) throw InvalidArgument("block size must be positive");
  blocks_.push_back({kind, size});
  return Index(blocks_.size()) - 1;
}

Index BlockSdpProblem::add_constraint(double rhs) {
  cons_.push_back(Constraint{{}, {}, rhs});
  return Index(cons_.size()) - 1;
}

void BlockSdpProblem::set_rhs(Index con, double rhs) {
  if (con < 0 || con >= num_constraints()) throw InvalidArgument("constraint index out of range");
  cons_[con].rhs = rhs;
}

void BlockSdpProblem::check_entry(Index block, Index i, Index j) const {
  if (block < 0 || block >= Index(blocks_.size())) throw InvalidArgument("block index out of range");
  const auto& b = blocks_[block];
  if (i < 0 || j < 0 || i >= b.size || j >= b.size) throw InvalidArgument("entry index outside its block");
  if (b.kind != BlockKind::PSD && i != j) throw InvalidArgument("diagonal blocks take only (i, i) entries");
}

void BlockSdpProblem::add_entry(Index con, Index block, Index i, Index j, double value) {
  if (con < 0 || con >= num_constraints()) throw InvalidArgument("constraint index out of range");
  check_entry(block, i, j);
  if (i > j) std::swap(i, j);
  cons_[con].entries.push_back({block, i, j, value});
}

void BlockSdpProblem::add_rank_one(Index con, Index block, VectorXd u, double scale) {
  if (con < 0 || con >= num_constraints()) throw InvalidArgument("constraint index out of range");
  if (block < 0 || block >= Index(blocks_.size())) throw InvalidArgument("block index out of range");
  if (blocks_[block].kind != BlockKind::PSD) throw InvalidArgument("rank-one terms need a PSD block");
  if (u.size() != blocks_[block].size) throw InvalidArgument("rank-one vector does not match block size");
  cons_[con].rank_one.push_back({block, std::move(u), scale});
}

void BlockSdpProblem::add_objective_entry(Index block, Index i, Index j, double value) {
  check_entry(block, i, j);
  if (i > j) std::swap(i, j);
  obj_.push_back({block, i, j, value});
}

VectorXd BlockSdpProblem::rhs() const {
  VectorXd b(num_constraints());
  for (Index j = 0; j < num_constraints(); ++j) b(j) = cons_[j].rhs;
  return b;
}

void BlockSdpProblem::validate() const {
  if (cons_.empty()) throw InvalidArgument("problem has no constraints");
  for (const auto& c : cons_) {
    if (!std::isfinite(c.rhs)) throw InvalidArgument("non-finite right-hand side");
    for (const auto& e : c.entries) {
      check_entry(e.block, e.i, e.j);
      if (!std::isfinite(e.value)) throw InvalidArgument("non-finite constraint coefficient");
    }
    for (const auto& r : c.rank_one) {
      if (r.block < 0 || r.block >= Index(blocks_.size()) || blocks_[r.block].kind != BlockKind::PSD ||
          r.u.size() != blocks_[r.block].size)
        throw InvalidArgument("malformed rank-one term");
      if (!r.u.allFinite() || !std::isfinite(r.scale)) throw InvalidArgument("non-finite rank-one term");
    }
  }
  for (const auto& e : obj_) {
    check_entry(e.block, e.i, e.j);
    if (!std::isfinite(e.value)) throw InvalidArgument("non-finite objective coefficient");
  }
}

namespace {

MatrixXd zero_block(const BlockSpec& b) {
  return b.kind == BlockKind::PSD ? MatrixXd::Zero(b.size, b.size) : MatrixXd::Zero(b.size, 1);
}

void scatter(MatrixXd& M, const BlockSpec& spec, const SparseEntry& e, double scale) {
  if (spec.kind != BlockKind::PSD) {
    M(e.i, 0) += scale * e.value;
    return;
  }
  M(e.i, e.j) += scale * e.value;
  if (e.i != e.j) M(e.j, e.i) += scale * e.value;
}

}  // namespace

MatrixXd BlockSdpProblem::dense_constraint(Index con, Index block) const {
  MatrixXd M = zero_block(blocks_.at(block));
  const auto& c = cons_.at(con);
  for (const auto& e : c.entries)
    if (e.block == block) scatter(M, blocks_[block], e, 1.0);
  for (const auto& r : c.rank_one)
    if (r.block == block) M.noalias() += r.scale * r.u * r.u.transpose();
  return M;
}

MatrixXd BlockSdpProblem::dense_objective(Index block) const {
  MatrixXd M = zero_block(blocks_.at(block));
  for (const auto& e : obj_)
    if (e.block == block) scatter(M, blocks_[block], e, 1.0);
  return M;
}

BlockValues BlockSdpProblem::zero_values() const {
  BlockValues v;
  for (const auto& b : blocks_) v.push_back(zero_block(b));
  return v;
}

double inner(const BlockValues& A, const BlockValues& X) {
  if (A.size() != X.size()) throw InvalidArgument("block count mismatch");
  double s = 0;
  for (std::size_t b = 0; b < A.size(); ++b) s += A[b].cwiseProduct(X[b]).sum();
  return s;
}

double frobenius_norm(const BlockValues& A) {
  double s = 0;
  for (const auto& M : A) s += M.squaredNorm();
  return std::sqrt(s);
}

VectorXd apply_constraints(const BlockSdpProblem& p, const BlockValues& X) {
  VectorXd out(p.num_constraints());
  const auto& blocks = p.blocks();
  for (Index j = 0; j < p.num_constraints(); ++j) {
    const auto& c = p.constraints()[j];
    double s = 0;
    for (const auto& e : c.entries) {
      if (blocks[e.block].kind != BlockKind::PSD)
        s += e.value * X[e.block](e.i, 0);
      else
        s += (e.i == e.j ? 1.0 : 2.0) * e.value * X[e.block](e.i, e.j);
    }
    for (const auto& r : c.rank_one) s += r.scale * r.u.dot(X[r.block] * r.u);
    out(j) = s;
  }
  return out;
}

BlockValues apply_adjoint(const BlockSdpProblem& p, const VectorXd& y) {
  BlockValues out = p.zero_values();
  const auto& blocks = p.blocks();
  for (Index j = 0; j < p.num_constraints(); ++j) {
    if (y(j) == 0.0) continue;
    const auto& c = p.constraints()[j];
    for (const auto& e : c.entries) scatter(out[e.block], blocks[e.block], e, y(j));
    for (const auto& r : c.rank_one) out[r.block].noalias() += (y(j) * r.scale) * r.u * r.u.transpose();
  }
  return out;
}

BlockValues objective_values(const BlockSdpProblem& p) {
  BlockValues out = p.zero_values();
  for (Index b = 0; b < Index(p.blocks().size()); ++b) out[b] = p.dense_objective(b);
  return out;
}

}  // namespace sosinterp::sdp
