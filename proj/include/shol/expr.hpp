#pragma once

// Complex expressions in one variable z: lexer, recursive-descent parser,
// evaluator, printer, folding simplifier and exact Wirtinger differentiation
// treating z and conj(z) as independent symbols.
//
// Grammar (whitespace insensitive):
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?            right-associative
//   atom   := number | 'i' | 'z' | name '(' expr {',' expr} ')' | '(' expr ')'
// Functions: exp log sin cos conj re im abs2 pow. log uses the principal
// branch; a^b with non-constant exponent is treated as exp(b*log(a)) and
// inherits the branch cut.

#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shol/errors.hpp"
#include "shol/field.hpp"

namespace shol::expr {

using shol::complex;

enum class TokenKind { number, identifier, op, paren, comma, end };

struct Token {
  TokenKind kind;
  std::string_view text;
  std::size_t position;
};

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto byte = [&](std::size_t k) { return static_cast<unsigned char>(src[k]); };
  while (i < src.size()) {
    if (std::isspace(byte(i))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    const char c = src[i];
    if (std::isdigit(byte(i)) || (c == '.' && i + 1 < src.size() && std::isdigit(byte(i + 1)))) {
      while (i < src.size() && std::isdigit(byte(i))) ++i;
      if (i < src.size() && src[i] == '.') {
        ++i;
        while (i < src.size() && std::isdigit(byte(i))) ++i;
      }
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < src.size() && std::isdigit(byte(j))) {
          i = j;
          while (i < src.size() && std::isdigit(byte(i))) ++i;
        }
      }
      out.push_back({TokenKind::number, src.substr(start, i - start), start});
      continue;
    }
    if (std::isalpha(byte(i)) || c == '_') {
      while (i < src.size() && (std::isalnum(byte(i)) || src[i] == '_')) ++i;
      out.push_back({TokenKind::identifier, src.substr(start, i - start), start});
      continue;
    }
    if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
      out.push_back({TokenKind::op, src.substr(i, 1), i});
      ++i;
      continue;
    }
    if (c == '(' || c == ')') {
      out.push_back({TokenKind::paren, src.substr(i, 1), i});
      ++i;
      continue;
    }
    if (c == ',') {
      out.push_back({TokenKind::comma, src.substr(i, 1), i});
      ++i;
      continue;
    }
    throw parse_error(std::string("unexpected character '") + c + "'", i, "token");
  }
  out.push_back({TokenKind::end, src.substr(src.size(), 0), src.size()});
  return out;
}

enum class NodeKind { literal, variable, neg, add, sub, mul, div, pow, call };
enum class Func { exp, log, sin, cos, conj, re, im, abs2 };

struct Node;
using Ast = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind;
  complex value{};
  Func func{};
  Ast a;
  Ast b;
};

inline Ast lit(complex v) { return std::make_shared<Node>(Node{NodeKind::literal, v, {}, nullptr, nullptr}); }
inline Ast lit(double v) { return lit(complex(v, 0.0)); }
inline Ast var() { return std::make_shared<Node>(Node{NodeKind::variable, {}, {}, nullptr, nullptr}); }
inline Ast unary(NodeKind k, Ast a) { return std::make_shared<Node>(Node{k, {}, {}, std::move(a), nullptr}); }
inline Ast binary(NodeKind k, Ast a, Ast b) { return std::make_shared<Node>(Node{k, {}, {}, std::move(a), std::move(b)}); }
inline Ast neg(Ast a) { return unary(NodeKind::neg, std::move(a)); }
inline Ast add(Ast a, Ast b) { return binary(NodeKind::add, std::move(a), std::move(b)); }
inline Ast sub(Ast a, Ast b) { return binary(NodeKind::sub, std::move(a), std::move(b)); }
inline Ast mul(Ast a, Ast b) { return binary(NodeKind::mul, std::move(a), std::move(b)); }
inline Ast div(Ast a, Ast b) { return binary(NodeKind::div, std::move(a), std::move(b)); }
inline Ast pow(Ast a, Ast b) { return binary(NodeKind::pow, std::move(a), std::move(b)); }
inline Ast call(Func f, Ast a) { return std::make_shared<Node>(Node{NodeKind::call, {}, f, std::move(a), nullptr}); }

namespace detail {

class Parser {
public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  Ast run() {
    Ast e = parse_expr();
    if (peek().kind != TokenKind::end)
      throw parse_error("unexpected trailing input", peek().position, "end of input");
    return e;
  }

private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& advance() { return toks_[pos_++]; }

  bool accept_op(char c) {
    if (peek().kind == TokenKind::op && peek().text[0] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect_paren(char c) {
    if (peek().kind == TokenKind::paren && peek().text[0] == c) {
      ++pos_;
      return;
    }
    throw parse_error(std::string("expected '") + c + "'", peek().position,
                      std::string(1, c));
  }

  Ast parse_expr() {
    Ast e = parse_term();
    for (;;) {
      if (accept_op('+'))
        e = add(e, parse_term());
      else if (accept_op('-'))
        e = sub(e, parse_term());
      else
        return e;
    }
  }

  Ast parse_term() {
    Ast e = parse_unary();
    for (;;) {
      if (accept_op('*'))
        e = mul(e, parse_unary());
      else if (accept_op('/'))
        e = div(e, parse_unary());
      else
        return e;
    }
  }

  Ast parse_unary() {
    if (accept_op('-')) return neg(parse_unary());
    return parse_power();
  }

  Ast parse_power() {
    Ast base = parse_atom();
    if (accept_op('^')) return pow(base, parse_unary());
    return base;
  }

  Ast parse_atom() {
    const Token& t = peek();
    if (t.kind == TokenKind::number) {
      advance();
      double v = 0.0;
      auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (res.ec != std::errc{} || res.ptr != t.text.data() + t.text.size())
        throw parse_error("malformed number", t.position, "number");
      return lit(v);
    }
    if (t.kind == TokenKind::identifier) {
      advance();
      if (t.text == "z") return var();
      if (t.text == "i") return lit(complex(0.0, 1.0));
      return parse_call(t);
    }
    if (t.kind == TokenKind::paren && t.text[0] == '(') {
      advance();
      Ast e = parse_expr();
      expect_paren(')');
      return e;
    }
    throw parse_error("expected value", t.position, "number, 'z', 'i', function or '('");
  }

  Ast parse_call(const Token& name) {
    Func f{};
    bool two_args = false;
    if (name.text == "exp") f = Func::exp;
    else if (name.text == "log") f = Func::log;
    else if (name.text == "sin") f = Func::sin;
    else if (name.text == "cos") f = Func::cos;
    else if (name.text == "conj") f = Func::conj;
    else if (name.text == "re") f = Func::re;
    else if (name.text == "im") f = Func::im;
    else if (name.text == "abs2") f = Func::abs2;
    else if (name.text == "pow") two_args = true;
    else
      throw parse_error("unknown identifier '" + std::string(name.text) + "'",
                        name.position, "function name, 'z' or 'i'");
    expect_paren('(');
    Ast a = parse_expr();
    if (two_args) {
      if (peek().kind != TokenKind::comma)
        throw parse_error("pow takes two arguments", peek().position, ",");
      advance();
      Ast b = parse_expr();
      expect_paren(')');
      return pow(std::move(a), std::move(b));
    }
    expect_paren(')');
    return call(f, std::move(a));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

inline complex ipow(complex base, long n, complex at) {
  if (n == 0) return {1.0, 0.0};
  const bool invert = n < 0;
  unsigned long e = invert ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
  if (base == 0.0) {
    if (invert) throw numerical_error("zero raised to a negative power", at);
    return {0.0, 0.0};
  }
  complex acc{1.0, 0.0};
  complex b = base;
  while (e) {
    if (e & 1u) acc *= b;
    b *= b;
    e >>= 1;
  }
  return invert ? complex(1.0, 0.0) / acc : acc;
}

}  // namespace detail

inline Ast parse(std::string_view source) { return detail::Parser(source).run(); }

inline complex eval(const Ast& n, complex z) {
  switch (n->kind) {
    case NodeKind::literal: return n->value;
    case NodeKind::variable: return z;
    case NodeKind::neg: return -eval(n->a, z);
    case NodeKind::add: return eval(n->a, z) + eval(n->b, z);
    case NodeKind::sub: return eval(n->a, z) - eval(n->b, z);
    case NodeKind::mul: return eval(n->a, z) * eval(n->b, z);
    case NodeKind::div: {
      const complex d = eval(n->b, z);
      if (d == 0.0) throw numerical_error("division by zero", z);
      return eval(n->a, z) / d;
    }
    case NodeKind::pow: {
      // Integer exponents multiply out, so polynomials stay exact (and
      // defined) at z = 0; everything else goes through exp(b*log(a)).
      const complex e = eval(n->b, z);
      if (e.imag() == 0.0 && std::isfinite(e.real()) &&
          e.real() == std::floor(e.real()) && std::abs(e.real()) <= 1024.0)
        return detail::ipow(eval(n->a, z), static_cast<long>(e.real()), z);
      const complex base = eval(n->a, z);
      if (base == 0.0)
        throw numerical_error("zero base with non-integer exponent", z);
      return std::exp(e * std::log(base));
    }
    case NodeKind::call: {
      const complex v = eval(n->a, z);
      switch (n->func) {
        case Func::exp: return std::exp(v);
        case Func::log:
          if (v == 0.0) throw numerical_error("log of zero", z);
          return std::log(v);
        case Func::sin: return std::sin(v);
        case Func::cos: return std::cos(v);
        case Func::conj: return std::conj(v);
        case Func::re: return {v.real(), 0.0};
        case Func::im: return {v.imag(), 0.0};
        case Func::abs2: return v * std::conj(v);
      }
      break;
    }
  }
  throw invalid_parameter_error("malformed expression node");
}

namespace detail {

inline int prec(const Ast& n) {
  switch (n->kind) {
    case NodeKind::add:
    case NodeKind::sub: return 1;
    case NodeKind::mul:
    case NodeKind::div: return 2;
    case NodeKind::neg: return 3;
    case NodeKind::pow: return 4;
    default: return 5;
  }
}

inline std::string fmt_literal(complex v) {
  if (v.imag() == 0.0) return shol::detail::format_g17(v.real());
  if (v.real() == 0.0 && v.imag() == 1.0) return "i";
  std::string s = "(" + shol::detail::format_g17(v.real());
  s += v.imag() < 0 ? "-" : "+";
  s += shol::detail::format_g17(std::abs(v.imag()));
  s += "*i)";
  return s;
}

inline std::string print_node(const Ast& n);

inline std::string wrapped(const Ast& n, int min_prec) {
  if (prec(n) < min_prec) return "(" + print_node(n) + ")";
  return print_node(n);
}

// a negative real literal prints with a leading '-', which would rebind as
// unary minus when used as a power base
inline std::string pow_base(const Ast& n) {
  if (n->kind == NodeKind::literal && n->value.imag() == 0.0 &&
      std::signbit(n->value.real()))
    return "(" + fmt_literal(n->value) + ")";
  return wrapped(n, 5);
}

inline std::string print_node(const Ast& n) {
  switch (n->kind) {
    case NodeKind::literal: return fmt_literal(n->value);
    case NodeKind::variable: return "z";
    case NodeKind::neg: return "-" + wrapped(n->a, 3);
    case NodeKind::add: return wrapped(n->a, 1) + " + " + wrapped(n->b, 2);
    case NodeKind::sub: return wrapped(n->a, 1) + " - " + wrapped(n->b, 2);
    case NodeKind::mul: return wrapped(n->a, 2) + "*" + wrapped(n->b, 3);
    case NodeKind::div: return wrapped(n->a, 2) + "/" + wrapped(n->b, 3);
    case NodeKind::pow: return pow_base(n->a) + "^" + wrapped(n->b, 3);
    case NodeKind::call: {
      const char* name = "";
      switch (n->func) {
        case Func::exp: name = "exp"; break;
        case Func::log: name = "log"; break;
        case Func::sin: name = "sin"; break;
        case Func::cos: name = "cos"; break;
        case Func::conj: name = "conj"; break;
        case Func::re: name = "re"; break;
        case Func::im: name = "im"; break;
        case Func::abs2: name = "abs2"; break;
      }
      return std::string(name) + "(" + print_node(n->a) + ")";
    }
  }
  return "?";
}

}  // namespace detail

// Emits text that parses back to an evaluation-equivalent expression.
inline std::string print(const Ast& n) { return detail::print_node(n); }

namespace detail {

inline bool is_const(const Ast& n) {
  switch (n->kind) {
    case NodeKind::literal: return true;
    case NodeKind::variable: return false;
    case NodeKind::neg:
    case NodeKind::call: return is_const(n->a);
    default: return is_const(n->a) && is_const(n->b);
  }
}

inline bool is_lit(const Ast& n, complex v) {
  return n->kind == NodeKind::literal && n->value == v;
}

}  // namespace detail

// Constant folding plus identity elimination. The result evaluates to the
// same value as the input at every finite point where both are defined.
inline Ast simplify(const Ast& n) {
  Ast a = n->a ? simplify(n->a) : nullptr;
  Ast b = n->b ? simplify(n->b) : nullptr;
  Ast node = n;
  if (a != n->a || b != n->b) {
    Node copy = *n;
    copy.a = a;
    copy.b = b;
    node = std::make_shared<Node>(copy);
  }
  if (node->kind != NodeKind::literal && detail::is_const(node)) {
    try {
      const complex v = eval(node, 0.0);
      if (finite(v)) return lit(v);
    } catch (const error&) {
      // leave unfolded; evaluation will report the failure in context
    }
  }
  switch (node->kind) {
    case NodeKind::add:
      if (detail::is_lit(node->a, 0.0)) return node->b;
      if (detail::is_lit(node->b, 0.0)) return node->a;
      break;
    case NodeKind::sub:
      if (detail::is_lit(node->b, 0.0)) return node->a;
      if (detail::is_lit(node->a, 0.0)) return neg(node->b);
      break;
    case NodeKind::mul:
      if (detail::is_lit(node->a, 0.0) || detail::is_lit(node->b, 0.0)) return lit(0.0);
      if (detail::is_lit(node->a, 1.0)) return node->b;
      if (detail::is_lit(node->b, 1.0)) return node->a;
      break;
    case NodeKind::div:
      if (detail::is_lit(node->a, 0.0)) return lit(0.0);
      if (detail::is_lit(node->b, 1.0)) return node->a;
      break;
    case NodeKind::pow:
      if (detail::is_lit(node->b, 1.0)) return node->a;
      if (detail::is_lit(node->b, 0.0)) return lit(1.0);
      break;
    case NodeKind::neg:
      if (node->a->kind == NodeKind::neg) return node->a->a;
      if (node->a->kind == NodeKind::literal) return lit(-node->a->value);
      break;
    default: break;
  }
  return node;
}

namespace detail {

// re/im/abs2 are not Wirtinger-differentiable as primitives; rewrite them
// into z / conj(z) combinations before differentiating.
inline Ast expand_special(const Ast& n) {
  Ast a = n->a ? expand_special(n->a) : nullptr;
  Ast b = n->b ? expand_special(n->b) : nullptr;
  if (n->kind == NodeKind::call) {
    switch (n->func) {
      case Func::re: return mul(lit(0.5), add(a, call(Func::conj, a)));
      case Func::im: return mul(lit(complex(0.0, -0.5)), sub(a, call(Func::conj, a)));
      case Func::abs2: return mul(a, call(Func::conj, a));
      default: break;
    }
  }
  if (a == n->a && b == n->b) return n;
  Node copy = *n;
  copy.a = a;
  copy.b = b;
  return std::make_shared<Node>(copy);
}

inline Ast d(const Ast& n, Wrt wrt) {
  const Wrt other = (wrt == Wrt::z) ? Wrt::zbar : Wrt::z;
  switch (n->kind) {
    case NodeKind::literal: return lit(0.0);
    case NodeKind::variable: return wrt == Wrt::z ? lit(1.0) : lit(0.0);
    case NodeKind::neg: return neg(d(n->a, wrt));
    case NodeKind::add: return add(d(n->a, wrt), d(n->b, wrt));
    case NodeKind::sub: return sub(d(n->a, wrt), d(n->b, wrt));
    case NodeKind::mul:
      return add(mul(d(n->a, wrt), n->b), mul(n->a, d(n->b, wrt)));
    case NodeKind::div:
      return div(sub(mul(d(n->a, wrt), n->b), mul(n->a, d(n->b, wrt))),
                 mul(n->b, n->b));
    case NodeKind::pow: {
      if (n->b->kind == NodeKind::literal) {
        const complex e = n->b->value;
        return mul(mul(lit(e), pow(n->a, lit(e - 1.0))), d(n->a, wrt));
      }
      // non-constant exponent: a^b == exp(b*log(a)) on the principal branch
      return d(call(Func::exp, mul(n->b, call(Func::log, n->a))), wrt);
    }
    case NodeKind::call:
      switch (n->func) {
        case Func::exp: return mul(call(Func::exp, n->a), d(n->a, wrt));
        case Func::log: return div(d(n->a, wrt), n->a);
        case Func::sin: return mul(call(Func::cos, n->a), d(n->a, wrt));
        case Func::cos: return neg(mul(call(Func::sin, n->a), d(n->a, wrt)));
        case Func::conj: return call(Func::conj, d(n->a, other));
        default: break;
      }
      break;
    default: break;
  }
  throw invalid_parameter_error("expression not rewritten before differentiation");
}

}  // namespace detail

// Exact derivative AST with respect to z or conj(z).
inline Ast wirtinger_symbolic(const Ast& ast, Wrt wrt) {
  return simplify(detail::d(detail::expand_special(ast), wrt));
}

inline shol::FieldFn to_field(Ast ast) {
  return [ast = std::move(ast)](complex z) { return eval(ast, z); };
}

}  // namespace shol::expr
