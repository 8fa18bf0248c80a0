#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "sosinterp/errors.hpp"

namespace sosinterp::sdp {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class BlockKind { PSD, Nonneg, Free };
enum class Sense { Min, Max };

const char* to_string(BlockKind k);

struct BlockSpec {
  BlockKind kind;
  Index size;
};

/// One symmetric coefficient entry; (i, j) with i != j stands for both (i, j) and (j, i).
/// Nonneg and Free blocks only use i == j (the variable index).
struct SparseEntry {
  Index block;
  Index i;
  Index j;
  double value;
};

/// scale * u u^T inside a PSD block.
struct RankOneTerm {
  Index block;
  VectorXd u;
  double scale = 1.0;
};

struct Constraint {
  std::vector<SparseEntry> entries;
  std::vector<RankOneTerm> rank_one;
  double rhs = 0.0;
};

/// Block values: PSD blocks are n x n, Nonneg and Free blocks n x 1.
using BlockValues = std::vector<MatrixXd>;

/// Block SDP in primal standard form
///   min/max <C, X>  s.t.  <A_j, X> = b_j,  X in PSD x Nonneg x Free.
class BlockSdpProblem {
 public:
  Index add_block(BlockKind kind, Index size);
  Index add_psd_block(Index size) { return add_block(BlockKind::PSD, size); }
  Index add_nonneg_block(Index size) { return add_block(BlockKind::Nonneg, size); }
  Index add_free_block(Index size) { return add_block(BlockKind::Free, size); }

  Index add_constraint(double rhs);
  void set_rhs(Index con, double rhs);
  /// Accumulates value into A_con at (i, j) and (j, i) of the block.
  void add_entry(Index con, Index block, Index i, Index j, double value);
  void add_rank_one(Index con, Index block, VectorXd u, double scale = 1.0);
  void add_objective_entry(Index block, Index i, Index j, double value);

  void set_sense(Sense s) noexcept { sense_ = s; }
  Sense sense() const noexcept { return sense_; }

  const std::vector<BlockSpec>& blocks() const noexcept { return blocks_; }
  const std::vector<Constraint>& constraints() const noexcept { return cons_; }
  const std::vector<SparseEntry>& objective() const noexcept { return obj_; }
  Index num_constraints() const noexcept { return Index(cons_.size()); }
  VectorXd rhs() const;

  /// Throws InvalidArgument on out-of-range indices or inconsistent data.
  void validate() const;

  /// Dense coefficient matrix of constraint `con` in `block` (n x n for PSD, n x 1 otherwise).
  MatrixXd dense_constraint(Index con, Index block) const;
  MatrixXd dense_objective(Index block) const;

  /// Zero block values shaped for this problem.
  BlockValues zero_values() const;

 private:
  void check_entry(Index block, Index i, Index j) const;

  std::vector<BlockSpec> blocks_;
  std::vector<Constraint> cons_;
  std::vector<SparseEntry> obj_;
  Sense sense_ = Sense::Min;
};

/// <A, X> summed over blocks, off-diagonal pairs counted twice.
double inner(const BlockValues& A, const BlockValues& X);
double frobenius_norm(const BlockValues& A);

/// A(X) in R^m.
VectorXd apply_constraints(const BlockSdpProblem& p, const BlockValues& X);
/// sum_j y_j A_j as block values.
BlockValues apply_adjoint(const BlockSdpProblem& p, const VectorXd& y);
BlockValues objective_values(const BlockSdpProblem& p);

}  // namespace sosinterp::sdp
