// SPDX-License-Identifier: Apache-2.0
#pragma once

// A small arithmetic language for rate functions of one variable `x`.
//
//   expr    = term , { ("+" | "-") , term } ;
//   term    = unary , { ("*" | "/") , unary } ;
//   unary   = "-" , unary | power ;
//   power   = primary , [ "^" , unary ] ;            (* right-associative *)
//   primary = number | "x" | "pi" | "e"
//           | func , "(" , expr , { "," , expr } , ")"
//           | "(" , expr , ")" ;
//   func    = "sin" | "cos" | "exp" | "log" | "sqrt" | "abs" | "min" | "max" ;
//
// Unary minus binds looser than "^", so "-2^2" is -(2^2).

#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ippp/error.hpp"

namespace ippp {

enum class TokenKind { number, identifier, op, paren, comma };

struct Token {
  TokenKind kind;
  std::string lexeme;
  std::size_t position;  // byte offset into the source

  bool operator==(const Token&) const = default;
};

inline std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = source.size();
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  auto is_ident_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
  auto is_ident = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };

  while (i < n) {
    const char c = source[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_digit(c) || (c == '.' && i + 1 < n && is_digit(source[i + 1]))) {
      while (i < n && is_digit(source[i])) ++i;
      if (i < n && source[i] == '.') {
        ++i;
        while (i < n && is_digit(source[i])) ++i;
      }
      // An exponent needs at least one digit; otherwise "2e" lexes as 2 followed by the constant e.
      if (i < n && (source[i] == 'e' || source[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < n && (source[j] == '+' || source[j] == '-')) ++j;
        if (j < n && is_digit(source[j])) {
          while (j < n && is_digit(source[j])) ++j;
          i = j;
        }
      }
      tokens.push_back({TokenKind::number, std::string(source.substr(start, i - start)), start});
    } else if (is_ident_start(c)) {
      while (i < n && is_ident(source[i])) ++i;
      tokens.push_back({TokenKind::identifier, std::string(source.substr(start, i - start)), start});
    } else if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
      tokens.push_back({TokenKind::op, std::string(1, c), start});
      ++i;
    } else if (c == '(' || c == ')') {
      tokens.push_back({TokenKind::paren, std::string(1, c), start});
      ++i;
    } else if (c == ',') {
      tokens.push_back({TokenKind::comma, ",", start});
      ++i;
    } else {
      throw LexError(start, std::string("unexpected character '") + c + "'");
    }
  }
  return tokens;
}

enum class Function { sin, cos, exp, log, sqrt, abs, min, max };

namespace detail {

inline std::optional<Function> lookup_function(std::string_view name) {
  if (name == "sin") return Function::sin;
  if (name == "cos") return Function::cos;
  if (name == "exp") return Function::exp;
  if (name == "log") return Function::log;
  if (name == "sqrt") return Function::sqrt;
  if (name == "abs") return Function::abs;
  if (name == "min") return Function::min;
  if (name == "max") return Function::max;
  return std::nullopt;
}

inline std::size_t arity(Function f) { return (f == Function::min || f == Function::max) ? 2 : 1; }

inline const char* function_name(Function f) {
  switch (f) {
    case Function::sin: return "sin";
    case Function::cos: return "cos";
    case Function::exp: return "exp";
    case Function::log: return "log";
    case Function::sqrt: return "sqrt";
    case Function::abs: return "abs";
    case Function::min: return "min";
    case Function::max: return "max";
  }
  return "?";
}

}  // namespace detail

/// Immutable expression tree. Nodes live in a flat pool and refer to their
/// children by index, so copies are cheap and share nothing mutable.
class RateExpr {
 public:
  enum class Kind { literal, variable, add, sub, mul, div, pow, neg, call };

  struct Node {
    Kind kind;
    double value = 0.0;           // literal
    Function function = Function::sin;  // call
    int lhs = -1;                 // first operand / first argument
    int rhs = -1;                 // second operand / second argument
    std::size_t position = 0;
  };

  double operator()(double x) const { return eval_node(root_, x); }

  /// Fully parenthesized structural form, e.g. "Add(1, Mul(2, x))".
  std::string describe() const { return describe_node(root_); }

  const std::string& source() const noexcept { return source_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

 private:
  friend class ExprParser;

  double eval_node(int index, double x) const {
    const Node& node = nodes_[static_cast<std::size_t>(index)];
    double result = 0.0;
    switch (node.kind) {
      case Kind::literal: return node.value;
      case Kind::variable: return x;
      case Kind::add: result = eval_node(node.lhs, x) + eval_node(node.rhs, x); break;
      case Kind::sub: result = eval_node(node.lhs, x) - eval_node(node.rhs, x); break;
      case Kind::mul: result = eval_node(node.lhs, x) * eval_node(node.rhs, x); break;
      case Kind::div: {
        const double den = eval_node(node.rhs, x);
        if (den == 0.0) throw EvalError(node.position, "division by zero");
        result = eval_node(node.lhs, x) / den;
        break;
      }
      case Kind::pow: result = std::pow(eval_node(node.lhs, x), eval_node(node.rhs, x)); break;
      case Kind::neg: return -eval_node(node.lhs, x);
      case Kind::call: result = eval_call(node, x); break;
    }
    if (!std::isfinite(result)) throw EvalError(node.position, "non-finite result");
    return result;
  }

  double eval_call(const Node& node, double x) const {
    const double a = eval_node(node.lhs, x);
    switch (node.function) {
      case Function::sin: return std::sin(a);
      case Function::cos: return std::cos(a);
      case Function::exp: return std::exp(a);
      case Function::log:
        if (a <= 0.0) throw EvalError(node.position, "log of a nonpositive number");
        return std::log(a);
      case Function::sqrt:
        if (a < 0.0) throw EvalError(node.position, "sqrt of a negative number");
        return std::sqrt(a);
      case Function::abs: return std::fabs(a);
      case Function::min: return std::fmin(a, eval_node(node.rhs, x));
      case Function::max: return std::fmax(a, eval_node(node.rhs, x));
    }
    return a;
  }

  std::string describe_node(int index) const {
    const Node& node = nodes_[static_cast<std::size_t>(index)];
    auto binary = [&](const char* name) {
      return std::string(name) + "(" + describe_node(node.lhs) + ", " + describe_node(node.rhs) + ")";
    };
    switch (node.kind) {
      case Kind::literal: {
        std::string text = std::to_string(node.value);
        text.erase(text.find_last_not_of('0') + 1);
        if (!text.empty() && text.back() == '.') text.pop_back();
        return text;
      }
      case Kind::variable: return "x";
      case Kind::add: return binary("Add");
      case Kind::sub: return binary("Sub");
      case Kind::mul: return binary("Mul");
      case Kind::div: return binary("Div");
      case Kind::pow: return binary("Pow");
      case Kind::neg: return "Neg(" + describe_node(node.lhs) + ")";
      case Kind::call: {
        std::string text = std::string(detail::function_name(node.function)) + "(" + describe_node(node.lhs);
        if (node.rhs >= 0) text += ", " + describe_node(node.rhs);
        return text + ")";
      }
    }
    return "?";
  }

  std::vector<Node> nodes_;
  int root_ = -1;
  std::string source_;
};

class ExprParser {
 public:
  ExprParser(const std::vector<Token>& tokens, std::size_t source_length, std::string source = {})
      : tokens_(tokens), end_position_(source_length) {
    expr_.source_ = std::move(source);
  }

  RateExpr parse() {
    if (tokens_.empty()) throw ParseError(end_position_, "an expression");
    expr_.root_ = parse_sum();
    if (pos_ < tokens_.size()) throw ParseError(tokens_[pos_].position, "an operator or end of input");
    return std::move(expr_);
  }

 private:
  using Kind = RateExpr::Kind;

  const Token* peek() const { return pos_ < tokens_.size() ? &tokens_[pos_] : nullptr; }
  std::size_t here() const { return pos_ < tokens_.size() ? tokens_[pos_].position : end_position_; }

  bool peek_is(TokenKind kind, std::string_view lexeme) const {
    const Token* t = peek();
    return t != nullptr && t->kind == kind && t->lexeme == lexeme;
  }

  void expect(TokenKind kind, std::string_view lexeme, const char* what) {
    if (!peek_is(kind, lexeme)) throw ParseError(here(), what);
    ++pos_;
  }

  int add(RateExpr::Node node) {
    expr_.nodes_.push_back(node);
    return static_cast<int>(expr_.nodes_.size() - 1);
  }

  int binary(Kind kind, int lhs, int rhs, std::size_t position) {
    RateExpr::Node node{kind};
    node.lhs = lhs;
    node.rhs = rhs;
    node.position = position;
    return add(node);
  }

  int parse_sum() {
    int lhs = parse_product();
    while (peek_is(TokenKind::op, "+") || peek_is(TokenKind::op, "-")) {
      const Token& op = tokens_[pos_++];
      const int rhs = parse_product();
      lhs = binary(op.lexeme == "+" ? Kind::add : Kind::sub, lhs, rhs, op.position);
    }
    return lhs;
  }

  int parse_product() {
    int lhs = parse_unary();
    while (peek_is(TokenKind::op, "*") || peek_is(TokenKind::op, "/")) {
      const Token& op = tokens_[pos_++];
      const int rhs = parse_unary();
      lhs = binary(op.lexeme == "*" ? Kind::mul : Kind::div, lhs, rhs, op.position);
    }
    return lhs;
  }

  int parse_unary() {
    if (peek_is(TokenKind::op, "-")) {
      const std::size_t position = tokens_[pos_++].position;
      RateExpr::Node node{Kind::neg};
      node.lhs = parse_unary();
      node.position = position;
      return add(node);
    }
    return parse_power();
  }

  int parse_power() {
    const int base = parse_primary();
    if (peek_is(TokenKind::op, "^")) {
      const std::size_t position = tokens_[pos_++].position;
      const int exponent = parse_unary();
      return binary(Kind::pow, base, exponent, position);
    }
    return base;
  }

  int parse_primary() {
    const Token* t = peek();
    if (t == nullptr) throw ParseError(end_position_, "an operand");
    switch (t->kind) {
      case TokenKind::number: {
        ++pos_;
        RateExpr::Node node{Kind::literal};
        node.value = std::strtod(t->lexeme.c_str(), nullptr);
        node.position = t->position;
        if (!std::isfinite(node.value)) throw ParseError(t->position, "a finite number");
        return add(node);
      }
      case TokenKind::identifier: return parse_identifier();
      case TokenKind::paren:
        if (t->lexeme == "(") {
          ++pos_;
          const int inner = parse_sum();
          expect(TokenKind::paren, ")", "')'");
          return inner;
        }
        break;
      default: break;
    }
    throw ParseError(t->position, "an operand");
  }

  int parse_identifier() {
    const Token& t = tokens_[pos_++];
    const bool is_call = peek_is(TokenKind::paren, "(");
    if (is_call) {
      const auto function = detail::lookup_function(t.lexeme);
      if (!function) throw UnknownFunction(t.position, t.lexeme);
      ++pos_;
      RateExpr::Node node{Kind::call};
      node.function = *function;
      node.position = t.position;
      node.lhs = parse_sum();
      if (detail::arity(*function) == 2) {
        expect(TokenKind::comma, ",", "','");
        node.rhs = parse_sum();
      }
      expect(TokenKind::paren, ")", "')'");
      return add(node);
    }
    RateExpr::Node node{Kind::literal};
    node.position = t.position;
    if (t.lexeme == "x") {
      node.kind = Kind::variable;
    } else if (t.lexeme == "pi") {
      node.value = std::numbers::pi;
    } else if (t.lexeme == "e") {
      node.value = std::numbers::e;
    } else if (detail::lookup_function(t.lexeme)) {
      throw ParseError(here(), "'(' after " + t.lexeme);
    } else {
      throw UnknownVariable(t.position, t.lexeme);
    }
    return add(node);
  }

  const std::vector<Token>& tokens_;
  std::size_t end_position_;
  std::size_t pos_ = 0;
  RateExpr expr_;
};

/// Parses a token stream produced by tokenize(). `source_length` positions
/// end-of-input errors.
inline RateExpr parse(const std::vector<Token>& tokens, std::size_t source_length = 0) {
  if (source_length == 0 && !tokens.empty())
    source_length = tokens.back().position + tokens.back().lexeme.size();
  return ExprParser(tokens, source_length).parse();
}

inline RateExpr parse(std::string_view source) {
  return ExprParser(tokenize(source), source.size(), std::string(source)).parse();
}

inline double eval(const RateExpr& expr, double x) { return expr(x); }

}  // namespace ippp
