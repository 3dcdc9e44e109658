#pragma once

// Arithmetic expressions over the plane coordinates (x, y). Scenario files use
// these to encode source terms and boundary data, so evaluation has to be
// hermetic and deterministic: a small recursive-descent parser into an AST.

#include <cctype>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "defeature/common.hpp"

namespace defeature::expr {

namespace detail {

enum class Op {
  Const, VarX, VarY,
  Add, Sub, Mul, Div, Pow, Neg,
  Exp, Log, Sin, Cos, Tan, Sqrt, Abs,
  Min, Max
};

struct Node {
  Op op;
  double value = 0.0;      // Const
  int a = -1, b = -1;      // child indices
};

}  // namespace detail

class Expression {
 public:
  Expression() = default;

  static Expression parse(const std::string& text);

  double operator()(double x, double y) const {
    return eval(root_, x, y);
  }

  const std::string& text() const { return text_; }
  bool empty() const { return nodes_.empty(); }

 private:
  double eval(int i, double x, double y) const {
    using detail::Op;
    const detail::Node& n = nodes_[static_cast<size_t>(i)];
    switch (n.op) {
      case Op::Const: return n.value;
      case Op::VarX: return x;
      case Op::VarY: return y;
      case Op::Add: return eval(n.a, x, y) + eval(n.b, x, y);
      case Op::Sub: return eval(n.a, x, y) - eval(n.b, x, y);
      case Op::Mul: return eval(n.a, x, y) * eval(n.b, x, y);
      case Op::Div: return eval(n.a, x, y) / eval(n.b, x, y);
      case Op::Pow: return std::pow(eval(n.a, x, y), eval(n.b, x, y));
      case Op::Neg: return -eval(n.a, x, y);
      case Op::Exp: return std::exp(eval(n.a, x, y));
      case Op::Log: return std::log(eval(n.a, x, y));
      case Op::Sin: return std::sin(eval(n.a, x, y));
      case Op::Cos: return std::cos(eval(n.a, x, y));
      case Op::Tan: return std::tan(eval(n.a, x, y));
      case Op::Sqrt: return std::sqrt(eval(n.a, x, y));
      case Op::Abs: return std::abs(eval(n.a, x, y));
      case Op::Min: return std::min(eval(n.a, x, y), eval(n.b, x, y));
      case Op::Max: return std::max(eval(n.a, x, y), eval(n.b, x, y));
    }
    return 0.0;
  }

  std::vector<detail::Node> nodes_;
  int root_ = -1;
  std::string text_;

  friend class Parser;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  Expression run() {
    Expression e;
    e.text_ = text_;
    out_ = &e.nodes_;
    e.root_ = parse_expr();
    skip_ws();
    if (pos_ != text_.size())
      fail("unexpected trailing input");
    out_ = nullptr;
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ExpressionError("expression error at position " +
                          std::to_string(pos_) + " in \"" + text_ + "\": " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) { ++pos_; return true; }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  int add(detail::Node n) {
    out_->push_back(n);
    return static_cast<int>(out_->size()) - 1;
  }

  int parse_expr() {
    int lhs = parse_term();
    for (;;) {
      if (consume('+')) lhs = add({detail::Op::Add, 0, lhs, parse_term()});
      else if (consume('-')) lhs = add({detail::Op::Sub, 0, lhs, parse_term()});
      else return lhs;
    }
  }

  int parse_term() {
    int lhs = parse_factor();
    for (;;) {
      if (consume('*')) lhs = add({detail::Op::Mul, 0, lhs, parse_factor()});
      else if (consume('/')) lhs = add({detail::Op::Div, 0, lhs, parse_factor()});
      else return lhs;
    }
  }

  // right-associative exponentiation
  int parse_factor() {
    int base = parse_unary();
    if (consume('^'))
      return add({detail::Op::Pow, 0, base, parse_factor()});
    return base;
  }

  int parse_unary() {
    if (consume('-')) return add({detail::Op::Neg, 0, parse_unary(), -1});
    if (consume('+')) return parse_unary();
    return parse_primary();
  }

  int parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      int e = parse_expr();
      if (!consume(')')) fail("missing ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    fail(std::string("unexpected character '") + c + "'");
  }

  int parse_number() {
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // 'e' was the Euler constant or an identifier, not an exponent
      }
    }
    try {
      size_t used = 0;
      double v = std::stod(text_.substr(start, pos_ - start), &used);
      if (used != pos_ - start) { pos_ = start; fail("malformed number"); }
      return add({detail::Op::Const, v, -1, -1});
    } catch (const std::exception&) {
      pos_ = start;
      fail("malformed number");
    }
  }

  int parse_ident() {
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name = text_.substr(start, pos_ - start);

    if (name == "x") return add({detail::Op::VarX, 0, -1, -1});
    if (name == "y") return add({detail::Op::VarY, 0, -1, -1});
    if (name == "pi") return add({detail::Op::Const, 3.14159265358979323846, -1, -1});
    if (name == "e") return add({detail::Op::Const, 2.71828182845904523536, -1, -1});

    using detail::Op;
    Op op;
    int arity = 1;
    if (name == "exp") op = Op::Exp;
    else if (name == "log") op = Op::Log;
    else if (name == "sin") op = Op::Sin;
    else if (name == "cos") op = Op::Cos;
    else if (name == "tan") op = Op::Tan;
    else if (name == "sqrt") op = Op::Sqrt;
    else if (name == "abs") op = Op::Abs;
    else if (name == "min") { op = Op::Min; arity = 2; }
    else if (name == "max") { op = Op::Max; arity = 2; }
    else if (name == "pow") { op = Op::Pow; arity = 2; }
    else fail("unknown identifier '" + name + "'");

    if (!consume('(')) fail("expected '(' after '" + name + "'");
    int a = parse_expr();
    int b = -1;
    if (arity == 2) {
      if (!consume(',')) fail("expected ',' in call to '" + name + "'");
      b = parse_expr();
    }
    if (!consume(')')) fail("missing ')' in call to '" + name + "'");
    return add({op, 0, a, b});
  }

  const std::string& text_;
  size_t pos_ = 0;
  std::vector<detail::Node>* out_ = nullptr;
};

inline Expression Expression::parse(const std::string& text) {
  return Parser(text).run();
}

}  // namespace defeature::expr
