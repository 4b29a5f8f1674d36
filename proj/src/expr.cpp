#include "miranda/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <utility>

namespace miranda {

ExprPtr make_number(double v) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Number;
  e->number = v;
  return e;
}

ExprPtr make_var(int index0) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Var;
  e->var = index0;
  return e;
}

ExprPtr make_binary(Expr::Kind op, ExprPtr lhs, ExprPtr rhs) {
  auto e = std::make_shared<Expr>();
  e->kind = op;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  return e;
}

ExprPtr make_pow(ExprPtr base, int exponent) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Pow;
  e->lhs = std::move(base);
  e->exponent = exponent;
  return e;
}

ExprPtr make_unary(UnaryFn fn, ExprPtr arg) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Unary;
  e->fn = fn;
  e->lhs = std::move(arg);
  return e;
}

namespace {

struct Parser {
  const std::string& src;
  std::size_t pos = 0;

  explicit Parser(const std::string& s) : src(s) {}

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool eof() {
    skip_ws();
    return pos >= src.size();
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  bool accept(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos);
  }

  ExprPtr parse_expr() {
    ExprPtr acc = parse_term();
    while (true) {
      if (accept('+')) {
        acc = make_binary(Expr::Kind::Add, acc, parse_term());
      } else if (accept('-')) {
        acc = make_binary(Expr::Kind::Sub, acc, parse_term());
      } else {
        return acc;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr acc = parse_factor();
    while (true) {
      if (accept('*')) {
        acc = make_binary(Expr::Kind::Mul, acc, parse_factor());
      } else if (accept('/')) {
        acc = make_binary(Expr::Kind::Div, acc, parse_factor());
      } else {
        return acc;
      }
    }
  }

  // Unary minus wraps the whole factor so that ^ binds tighter: -x1^2 = -(x1^2).
  ExprPtr parse_factor() {
    if (accept('-')) return make_unary(UnaryFn::Neg, parse_factor());
    ExprPtr base = parse_base();
    if (accept('^')) return make_pow(base, parse_integer());
    return base;
  }

  ExprPtr parse_base() {
    skip_ws();
    if (pos >= src.size()) throw ParseError("unexpected end of expression", pos);
    const char c = src[pos];
    if (c == '(') {
      ++pos;
      ExprPtr inner = parse_expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    throw ParseError(std::string("unexpected character '") + c + "'", pos);
  }

  int parse_integer() {
    skip_ws();
    std::size_t start = pos;
    bool neg = false;
    if (pos < src.size() && (src[pos] == '-' || src[pos] == '+')) {
      neg = src[pos] == '-';
      ++pos;
    }
    if (pos >= src.size() || !std::isdigit(static_cast<unsigned char>(src[pos])))
      throw ParseError("expected integer exponent", pos);
    long v = 0;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
      v = v * 10 + (src[pos] - '0');
      if (v > 1000) throw ParseError("exponent too large", start);
      ++pos;
    }
    return static_cast<int>(neg ? -v : v);
  }

  ExprPtr parse_number() {
    skip_ws();
    const std::size_t start = pos;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
    if (pos < src.size() && src[pos] == '.') {
      ++pos;
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
      std::size_t mark = pos;
      ++pos;
      if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) ++pos;
      if (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
        while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
      } else {
        pos = mark;  // "e" belongs to a following identifier, not this literal
      }
    }
    if (pos == start) throw ParseError("expected number", pos);
    double value = 0.0;
    auto res = std::from_chars(src.data() + start, src.data() + pos, value);
    if (res.ec != std::errc()) throw ParseError("malformed number literal", start);
    return make_number(value);
  }

  ExprPtr parse_ident() {
    skip_ws();
    const std::size_t start = pos;
    while (pos < src.size() && (std::isalnum(static_cast<unsigned char>(src[pos])))) ++pos;
    const std::string word = src.substr(start, pos - start);

    if (word.size() >= 2 && word[0] == 'x') {
      bool digits = true;
      for (std::size_t i = 1; i < word.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(word[i]))) digits = false;
      if (digits) {
        const long idx = std::strtol(word.c_str() + 1, nullptr, 10);
        if (idx < 1) throw ParseError("variable index must be positive", start);
        return make_var(static_cast<int>(idx - 1));
      }
    }

    UnaryFn fn;
    if (word == "sin")
      fn = UnaryFn::Sin;
    else if (word == "cos")
      fn = UnaryFn::Cos;
    else if (word == "exp")
      fn = UnaryFn::Exp;
    else if (word == "tanh")
      fn = UnaryFn::Tanh;
    else if (word == "abs")
      fn = UnaryFn::Abs;
    else
      throw ParseError("unknown identifier '" + word + "'", start);

    expect('(');
    ExprPtr arg = parse_expr();
    expect(')');
    return make_unary(fn, arg);
  }
};

const char* fn_name(UnaryFn fn) {
  switch (fn) {
    case UnaryFn::Neg:
      return "-";
    case UnaryFn::Sin:
      return "sin";
    case UnaryFn::Cos:
      return "cos";
    case UnaryFn::Exp:
      return "exp";
    case UnaryFn::Tanh:
      return "tanh";
    case UnaryFn::Abs:
      return "abs";
  }
  return "?";
}

std::string number_text(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<ExprPtr> parse_map_text(const std::string& text) {
  Parser p(text);
  std::vector<ExprPtr> comps;
  comps.push_back(p.parse_expr());
  while (p.accept(';')) comps.push_back(p.parse_expr());
  if (!p.eof()) throw ParseError("trailing input after expression", p.pos);
  return comps;
}

std::string to_text(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Number: {
      const std::string t = number_text(e.number);
      // A leading minus would re-parse as unary negation of a positive literal,
      // which evaluates identically but keep the token well-formed anyway.
      if (!t.empty() && t[0] == '-') return "(0 - " + t.substr(1) + ")";
      return t;
    }
    case Expr::Kind::Var:
      return "x" + std::to_string(e.var + 1);
    case Expr::Kind::Add:
      return "(" + to_text(*e.lhs) + " + " + to_text(*e.rhs) + ")";
    case Expr::Kind::Sub:
      return "(" + to_text(*e.lhs) + " - " + to_text(*e.rhs) + ")";
    case Expr::Kind::Mul:
      return "(" + to_text(*e.lhs) + " * " + to_text(*e.rhs) + ")";
    case Expr::Kind::Div:
      return "(" + to_text(*e.lhs) + " / " + to_text(*e.rhs) + ")";
    case Expr::Kind::Pow:
      return "(" + to_text(*e.lhs) + ")^" + std::to_string(e.exponent);
    case Expr::Kind::Unary:
      if (e.fn == UnaryFn::Neg) return "(-(" + to_text(*e.lhs) + "))";
      return std::string(fn_name(e.fn)) + "(" + to_text(*e.lhs) + ")";
  }
  return "";
}

std::string map_to_text(std::span<const ExprPtr> components) {
  std::string out;
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (i > 0) out += " ; ";
    out += to_text(*components[i]);
  }
  return out;
}

int max_variable(const Expr& e) {
  int m = 0;
  if (e.kind == Expr::Kind::Var) m = e.var + 1;
  if (e.lhs) m = std::max(m, max_variable(*e.lhs));
  if (e.rhs) m = std::max(m, max_variable(*e.rhs));
  return m;
}

bool contains_abs(const Expr& e) {
  if (e.kind == Expr::Kind::Unary && e.fn == UnaryFn::Abs) return true;
  if (e.lhs && contains_abs(*e.lhs)) return true;
  if (e.rhs && contains_abs(*e.rhs)) return true;
  return false;
}

}  // namespace miranda
