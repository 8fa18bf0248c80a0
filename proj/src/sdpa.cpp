#include "sosinterp/sdp/sdpa.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

namespace sosinterp::sdp {

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Entries of one SDPA matrix (matno) in one block, upper triangle, 0-based.
using EntryMap = std::map<std::pair<Index, Index>, double>;

void accumulate_block(const MatrixXd& D, BlockKind kind, EntryMap& out) {
  if (kind == BlockKind::PSD) {
    for (Index i = 0; i < D.rows(); ++i)
      for (Index j = i; j < D.cols(); ++j)
        if (D(i, j) != 0.0) out[{i, j}] = D(i, j);
  } else {
    const Index s = D.rows();
    for (Index i = 0; i < s; ++i) {
      if (D(i) == 0.0) continue;
      out[{i, i}] = D(i);
      if (kind == BlockKind::Free) out[{s + i, s + i}] = -D(i);
    }
  }
}

struct Token {
  std::string text;
  std::size_t line;
};

class TokenStream {
 public:
  explicit TokenStream(std::istream& in) {
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
      ++no;
      if (!line.empty() && (line[0] == '"' || line[0] == '*')) {
        comments_.push_back({line, no});
        continue;
      }
      for (char& c : line)
        if (c == ',' || c == '{' || c == '}' || c == '(' || c == ')') c = ' ';
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) tokens_.push_back({tok, no});
    }
    last_line_ = no;
  }

  bool done() const { return pos_ >= tokens_.size(); }
  std::size_t line() const { return done() ? last_line_ : tokens_[pos_].line; }
  const std::vector<Token>& comments() const { return comments_; }

  const Token& next(const char* what) {
    if (done()) throw ParseError(last_line_, std::string("unexpected end of file, expected ") + what);
    return tokens_[pos_++];
  }

  long long next_int(const char* what) {
    const Token& t = next(what);
    long long v = 0;
    const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size()) {
      // tolerate integral values written as floating point, e.g. "2.0"
      const double d = parse_double(t, what);
      if (d != std::floor(d)) throw ParseError(t.line, std::string("expected integer ") + what + ", got '" + t.text + "'");
      return static_cast<long long>(d);
    }
    return v;
  }

  double next_double(const char* what) { return parse_double(next(what), what); }

 private:
  static double parse_double(const Token& t, const char* what) {
    double v = 0;
    const char* b = t.text.data();
    const char* e = b + t.text.size();
    if (b != e && *b == '+') ++b;
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e)
      throw ParseError(t.line, std::string("expected number ") + what + ", got '" + t.text + "'");
    return v;
  }

  std::vector<Token> tokens_;
  std::vector<Token> comments_;
  std::size_t pos_ = 0;
  std::size_t last_line_ = 0;
};

}  // namespace

void export_sdpa(const BlockSdpProblem& p, std::ostream& out) {
  p.validate();
  const auto& blocks = p.blocks();
  const Index m = p.num_constraints();
  out << "\"sosinterp block SDP\n";
  if (p.sense() == Sense::Min) out << "* sense min\n";
  for (Index k = 0; k < Index(blocks.size()); ++k)
    if (blocks[k].kind == BlockKind::Free) out << "* free block " << (k + 1) << ' ' << blocks[k].size << '\n';
  out << m << '\n' << blocks.size() << '\n';
  for (Index k = 0; k < Index(blocks.size()); ++k) {
    const auto& b = blocks[k];
    const Index size = b.kind == BlockKind::Free ? 2 * b.size : b.size;
    out << (b.kind == BlockKind::PSD ? size : -size) << (k + 1 < Index(blocks.size()) ? " " : "\n");
  }
  for (Index j = 0; j < m; ++j) out << format_double(p.constraints()[j].rhs) << (j + 1 < m ? " " : "\n");
  if (m == 0) out << '\n';
  const double obj_sign = p.sense() == Sense::Min ? -1.0 : 1.0;
  for (Index mat = 0; mat <= m; ++mat) {
    for (Index k = 0; k < Index(blocks.size()); ++k) {
      MatrixXd D = mat == 0 ? MatrixXd(obj_sign * p.dense_objective(k)) : p.dense_constraint(mat - 1, k);
      EntryMap entries;
      accumulate_block(D, blocks[k].kind, entries);
      for (const auto& [ij, v] : entries)
        out << mat << ' ' << (k + 1) << ' ' << (ij.first + 1) << ' ' << (ij.second + 1) << ' ' << format_double(v)
            << '\n';
    }
  }
}

void export_sdpa(const BlockSdpProblem& p, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open '" + path.string() + "' for writing");
  export_sdpa(p, out);
  if (!out) throw InvalidArgument("write to '" + path.string() + "' failed");
}

BlockSdpProblem import_sdpa(std::istream& in) {
  TokenStream ts(in);
  bool minimize = false;
  std::map<Index, Index> free_blocks;  // 0-based block -> s
  for (const auto& c : ts.comments()) {
    std::istringstream cs(c.text.substr(1));
    std::string w1, w2;
    cs >> w1 >> w2;
    if (w1 == "sense" && w2 == "min") minimize = true;
    if (w1 == "free" && w2 == "block") {
      long long blk = 0, s = 0;
      if (!(cs >> blk >> s) || blk < 1 || s < 1) throw ParseError(c.line, "malformed free block comment");
      free_blocks[Index(blk - 1)] = Index(s);
    }
  }
  const long long m = ts.next_int("constraint count");
  if (m < 0) throw ParseError(ts.line(), "negative constraint count");
  const long long nb = ts.next_int("block count");
  if (nb < 1) throw ParseError(ts.line(), "block count must be positive");
  BlockSdpProblem p;
  std::vector<Index> sdpa_size(nb);
  for (long long k = 0; k < nb; ++k) {
    const std::size_t line = ts.line();
    const long long sz = ts.next_int("block size");
    if (sz == 0) throw ParseError(line, "block size 0");
    sdpa_size[k] = Index(std::llabs(sz));
    auto it = free_blocks.find(Index(k));
    if (it != free_blocks.end()) {
      if (sz >= 0 || -sz != 2 * it->second) throw ParseError(line, "free block must be diagonal of twice its size");
      p.add_free_block(it->second);
    } else if (sz > 0) {
      p.add_psd_block(Index(sz));
    } else {
      p.add_nonneg_block(Index(-sz));
    }
  }
  for (long long j = 0; j < m; ++j) p.add_constraint(ts.next_double("right-hand side"));
  const auto& blocks = p.blocks();
  while (!ts.done()) {
    const std::size_t line = ts.line();
    const long long mat = ts.next_int("matrix number");
    const long long blk = ts.next_int("block number");
    const long long i = ts.next_int("row index");
    const long long jj = ts.next_int("column index");
    const double v = ts.next_double("entry value");
    if (mat < 0 || mat > m) throw ParseError(line, "matrix number out of range");
    if (blk < 1 || blk > nb) throw ParseError(line, "block number out of range");
    const Index b = Index(blk - 1);
    if (i < 1 || jj < 1 || i > sdpa_size[b] || jj > sdpa_size[b]) throw ParseError(line, "entry index outside its block");
    Index r = Index(i - 1), c = Index(jj - 1);
    double value = v;
    if (blocks[b].kind != BlockKind::PSD) {
      if (r != c) throw ParseError(line, "off-diagonal entry in a diagonal block");
      if (blocks[b].kind == BlockKind::Free) {
        // keep x+; the x- half must mirror it and is dropped
        if (r >= blocks[b].size) continue;
      }
    }
    if (mat == 0) {
      p.add_objective_entry(b, r, c, minimize ? -value : value);
    } else {
      p.add_entry(Index(mat - 1), b, r, c, value);
    }
  }
  p.set_sense(minimize ? Sense::Min : Sense::Max);
  return p;
}

BlockSdpProblem import_sdpa(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  return import_sdpa(in);
}

}  // namespace sosinterp::sdp
