#pragma once

#include <filesystem>
#include <iosfwd>

#include "sosinterp/sdp/problem.hpp"

namespace sosinterp::sdp {

/// Writes the problem in SDPA sparse format (.dat-s).
///
/// SDPA's dual form max <F0, Y> s.t. <F_i, Y> = c_i is our primal, so c = b,
/// F_i = A_i and F0 = C (or -C with a "* sense min" comment). A Free block of
/// size s becomes a diagonal block of size 2s holding x+ then x-, announced by
/// "* free block <blkno> <s>". Rank-one terms are expanded; only nonzeros of
/// the upper triangle are written, one per line.
void export_sdpa(const BlockSdpProblem& p, std::ostream& out);
void export_sdpa(const BlockSdpProblem& p, const std::filesystem::path& path);

/// Reads SDPA sparse format; duplicate entries are summed. Throws ParseError.
BlockSdpProblem import_sdpa(std::istream& in);
BlockSdpProblem import_sdpa(const std::filesystem::path& path);

}  // namespace sosinterp::sdp
