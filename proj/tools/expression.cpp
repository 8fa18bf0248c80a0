#include "expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

#include "sosinterp/errors.hpp"

namespace sosinterp::cli {

struct Expression::Node {
  enum class Op { Constant, Var, Add, Sub, Mul, Div, Neg, Exp, Cosh, Pow } op;
  double value = 0;
  std::vector<std::shared_ptr<const Node>> args;

  double eval(double t) const {
    switch (op) {
      case Op::Constant: return value;
      case Op::Var: return t;
      case Op::Add: return args[0]->eval(t) + args[1]->eval(t);
      case Op::Sub: return args[0]->eval(t) - args[1]->eval(t);
      case Op::Mul: return args[0]->eval(t) * args[1]->eval(t);
      case Op::Div: return args[0]->eval(t) / args[1]->eval(t);
      case Op::Neg: return -args[0]->eval(t);
      case Op::Exp: return std::exp(args[0]->eval(t));
      case Op::Cosh: return std::cosh(args[0]->eval(t));
      case Op::Pow: return std::pow(args[0]->eval(t), args[1]->eval(t));
    }
    return 0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make(Op op, std::vector<NodePtr> args = {}, double value = 0) {
  return std::make_shared<const Expression::Node>(Expression::Node{op, value, std::move(args)});
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidArgument("expression \"" + std::string(s_) + "\", column " + std::to_string(pos_ + 1) + ": " + what);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make(Op::Add, {lhs, term()});
      else if (accept('-'))
        lhs = make(Op::Sub, {lhs, term()});
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = make(Op::Mul, {lhs, unary()});
      else if (accept('/'))
        lhs = make(Op::Div, {lhs, unary()});
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, {unary()});
    if (accept('+')) return unary();
    return primary();
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (accept('(')) {
      NodePtr e = expr();
      expect(')');
      return e;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string_view name = s_.substr(start, pos_ - start);
      if (name == "t") return make(Op::Var);
      if (name == "pi") return make(Op::Constant, {}, std::numbers::pi);
      if (name == "exp" || name == "cosh") {
        expect('(');
        NodePtr a = expr();
        expect(')');
        return make(name == "exp" ? Op::Exp : Op::Cosh, {a});
      }
      if (name == "pow") {
        expect('(');
        NodePtr a = expr();
        expect(',');
        NodePtr b = expr();
        expect(')');
        return make(Op::Pow, {a, b});
      }
      pos_ = start;
      fail("unknown name '" + std::string(name) + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    double v = 0;
    const auto [end, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail("malformed number");
    pos_ = std::size_t(end - s_.data());
    return make(Op::Constant, {}, v);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text) {
  Expression e;
  e.root_ = Parser(text).parse();
  e.text_ = std::string(text);
  return e;
}

double Expression::operator()(double t) const { return root_->eval(t); }

}  // namespace sosinterp::cli
