#pragma once

// Immutable scalar expression trees over x1..x4 with exact differentiation.
//
// Node set: constant, variable, sum, product, integer power, exp, reciprocal,
// square root. Differentiation is closed on this set. Factories fold constants
// and drop additive zeros / multiplicative ones so repeated differentiation
// stays small.
//
// Text grammar accepted by parse_scalar_field:
//   expr    := term   (('+' | '-') term)*
//   term    := unary  (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          exponent must fold to an integer
//   primary := number | 'x1'..'x4' | ('exp' | 'sqrt') '(' expr ')' | '(' expr ')'
//   number  := digits ['.' digits] [('e' | 'E') ['+' | '-'] digits]

#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <system_error>

#include "curvlab/error.hpp"

namespace curvlab {

using Point = std::array<double, 4>;

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

class ScalarField {
 public:
  enum class Kind { constant, variable, sum, product, power, exp, reciprocal, sqrt };

  ScalarField() : ScalarField(constant(0.0)) {}

  static ScalarField constant(double v) { return ScalarField(make(Kind::constant, v, 0, nullptr, nullptr)); }

  /// x_index, index in 1..4.
  static ScalarField variable(int index) {
    if (index < 1 || index > 4) throw InvalidArgument("ScalarField::variable: index must be in 1..4");
    return ScalarField(make(Kind::variable, 0.0, index, nullptr, nullptr));
  }

  Kind kind() const noexcept { return node_->kind; }
  bool is_constant() const noexcept { return node_->kind == Kind::constant; }
  bool is_constant(double v) const noexcept { return is_constant() && node_->value == v; }
  double constant_value() const noexcept { return node_->value; }

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    if (a.is_constant() && b.is_constant()) return constant(a.node_->value + b.node_->value);
    if (a.is_constant(0.0)) return b;
    if (b.is_constant(0.0)) return a;
    return ScalarField(make(Kind::sum, 0.0, 0, a.node_, b.node_));
  }

  friend ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    if (a.is_constant() && b.is_constant()) return constant(a.node_->value * b.node_->value);
    if (a.is_constant(0.0) || b.is_constant(0.0)) return constant(0.0);
    if (a.is_constant(1.0)) return b;
    if (b.is_constant(1.0)) return a;
    return ScalarField(make(Kind::product, 0.0, 0, a.node_, b.node_));
  }

  friend ScalarField operator-(const ScalarField& a) { return constant(-1.0) * a; }
  friend ScalarField operator-(const ScalarField& a, const ScalarField& b) { return a + (-b); }
  friend ScalarField operator/(const ScalarField& a, const ScalarField& b) { return a * reciprocal(b); }

  friend ScalarField pow(const ScalarField& a, int n) {
    if (n == 0) return constant(1.0);
    if (n == 1) return a;
    if (a.is_constant()) return constant(std::pow(a.node_->value, n));
    return ScalarField(make(Kind::power, 0.0, n, a.node_, nullptr));
  }

  friend ScalarField exp(const ScalarField& a) {
    if (a.is_constant()) return constant(std::exp(a.node_->value));
    return ScalarField(make(Kind::exp, 0.0, 0, a.node_, nullptr));
  }

  friend ScalarField reciprocal(const ScalarField& a) {
    if (a.is_constant() && a.node_->value != 0.0) return constant(1.0 / a.node_->value);
    return ScalarField(make(Kind::reciprocal, 0.0, 0, a.node_, nullptr));
  }

  friend ScalarField sqrt(const ScalarField& a) {
    if (a.is_constant() && a.node_->value >= 0.0) return constant(std::sqrt(a.node_->value));
    return ScalarField(make(Kind::sqrt, 0.0, 0, a.node_, nullptr));
  }

  /// Exact partial derivative with respect to x_index (1..4).
  ScalarField derivative(int index) const {
    if (index < 1 || index > 4) throw InvalidArgument("ScalarField::derivative: index must be in 1..4");
    return differentiate(node_, index);
  }

  double evaluate(const Point& p) const { return eval(*node_, p); }

  /// Re-parseable text form.
  std::string to_string() const { return print(*node_); }

 private:
  struct Node {
    Kind kind;
    double value;
    int index;  // variable index, or integer exponent
    std::shared_ptr<const Node> a, b;
  };
  using NodePtr = std::shared_ptr<const Node>;

  explicit ScalarField(NodePtr node) : node_(std::move(node)) {}

  static NodePtr make(Kind k, double v, int i, NodePtr a, NodePtr b) {
    return std::make_shared<const Node>(Node{k, v, i, std::move(a), std::move(b)});
  }

  static ScalarField differentiate(const NodePtr& n, int v) {
    const ScalarField self(n);
    switch (n->kind) {
      case Kind::constant:
        return constant(0.0);
      case Kind::variable:
        return constant(n->index == v ? 1.0 : 0.0);
      case Kind::sum:
        return differentiate(n->a, v) + differentiate(n->b, v);
      case Kind::product: {
        const ScalarField a(n->a), b(n->b);
        return differentiate(n->a, v) * b + a * differentiate(n->b, v);
      }
      case Kind::power: {
        const ScalarField a(n->a);
        return constant(n->index) * pow(a, n->index - 1) * differentiate(n->a, v);
      }
      case Kind::exp:
        return self * differentiate(n->a, v);
      case Kind::reciprocal:
        return -(differentiate(n->a, v) * pow(self, 2));
      case Kind::sqrt:
        return differentiate(n->a, v) * constant(0.5) * reciprocal(self);
    }
    throw Error("ScalarField: unknown node");
  }

  static double eval(const Node& n, const Point& p) {
    switch (n.kind) {
      case Kind::constant:
        return n.value;
      case Kind::variable:
        return p[n.index - 1];
      case Kind::sum:
        return eval(*n.a, p) + eval(*n.b, p);
      case Kind::product:
        return eval(*n.a, p) * eval(*n.b, p);
      case Kind::power: {
        const double base = eval(*n.a, p);
        double out = 1.0;
        for (int k = 0; k < std::abs(n.index); ++k) out *= base;
        return n.index < 0 ? 1.0 / out : out;
      }
      case Kind::exp:
        return std::exp(eval(*n.a, p));
      case Kind::reciprocal:
        return 1.0 / eval(*n.a, p);
      case Kind::sqrt:
        return std::sqrt(eval(*n.a, p));
    }
    throw Error("ScalarField: unknown node");
  }

  static std::string print(const Node& n) {
    switch (n.kind) {
      case Kind::constant:
        return n.value < 0.0 ? "(" + format_double(n.value) + ")" : format_double(n.value);
      case Kind::variable:
        return "x" + std::to_string(n.index);
      case Kind::sum:
        return "(" + print(*n.a) + " + " + print(*n.b) + ")";
      case Kind::product:
        return print(*n.a) + "*" + print(*n.b);
      case Kind::power:
        return "(" + print(*n.a) + ")^" + (n.index < 0 ? "(" + std::to_string(n.index) + ")" : std::to_string(n.index));
      case Kind::exp:
        return "exp(" + print(*n.a) + ")";
      case Kind::reciprocal:
        return "(1/(" + print(*n.a) + "))";
      case Kind::sqrt:
        return "sqrt(" + print(*n.a) + ")";
    }
    throw Error("ScalarField: unknown node");
  }

  NodePtr node_;
};

namespace detail {

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view text) : text_(text) {}

  ScalarField parse() {
    ScalarField out = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError("expression: " + what, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  ScalarField expr() {
    ScalarField out = term();
    for (;;) {
      if (accept('+')) {
        out = out + term();
      } else if (accept('-')) {
        out = out - term();
      } else {
        return out;
      }
    }
  }

  ScalarField term() {
    ScalarField out = unary();
    for (;;) {
      if (accept('*')) {
        out = out * unary();
      } else if (accept('/')) {
        out = out / unary();
      } else {
        return out;
      }
    }
  }

  ScalarField unary() {
    if (accept('-')) return -unary();
    return power();
  }

  ScalarField power() {
    ScalarField base = primary();
    if (!accept('^')) return base;
    const std::size_t at = pos_;
    const ScalarField exponent = unary();
    const double v = exponent.constant_value();
    if (!exponent.is_constant() || v != std::floor(v) || std::abs(v) > 64.0) {
      pos_ = at;
      fail("exponent must be an integer constant");
    }
    return pow(base, static_cast<int>(v));
  }

  ScalarField primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '4')
        return ScalarField::variable(name[1] - '0');
      if (name == "exp" || name == "sqrt") {
        expect('(');
        const ScalarField arg = expr();
        expect(')');
        return name == "exp" ? exp(arg) : sqrt(arg);
      }
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'");
    }
    if (accept('(')) {
      const ScalarField inner = expr();
      expect(')');
      return inner;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  ScalarField number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t from = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return pos_ > from;
    };
    bool any = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      any = digits() || any;
    }
    if (!any) {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (!digits()) fail("malformed exponent in number");
    }
    double v = 0.0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return ScalarField::constant(v);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses the documented grammar; throws ParseError carrying the offset.
inline ScalarField parse_scalar_field(std::string_view text) { return detail::ExpressionParser(text).parse(); }

}  // namespace curvlab
