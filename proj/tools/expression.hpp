#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace sosinterp::cli {

/// A real function of t parsed from text.
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('+' | '-') unary | primary
///   primary := number | 't' | 'pi' | call | '(' expr ')'
///   call    := ('exp' | 'cosh') '(' expr ')' | 'pow' '(' expr ',' expr ')'
///
/// Copies share the parsed tree.
class Expression {
 public:
  struct Node;

  /// Throws InvalidArgument naming the offending column.
  static Expression parse(std::string_view text);

  double operator()(double t) const;
  const std::string& text() const noexcept { return text_; }

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace sosinterp::cli
