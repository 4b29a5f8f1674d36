#pragma once

#include <cmath>
#include <cstdlib>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "miranda/dual.hpp"
#include "miranda/errors.hpp"

namespace miranda {

// Expression AST for the map grammar:
//   map      := expr (";" expr)*
//   expr     := term (("+"|"-") term)*
//   term     := factor (("*"|"/") factor)*
//   factor   := base ("^" integer)?
//   base     := number | variable | func "(" expr ")" | "(" expr ")" | "-" base
//   variable := "x" positive-integer
//   func     := "sin"|"cos"|"exp"|"tanh"|"abs"
// "^" binds tighter than unary minus, so -x1^2 means -(x1^2).

enum class UnaryFn { Neg, Sin, Cos, Exp, Tanh, Abs };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Number, Var, Add, Sub, Mul, Div, Pow, Unary };

  Kind kind;
  double number = 0.0;  // Number
  int var = 0;          // Var, 0-based
  int exponent = 0;     // Pow
  UnaryFn fn = UnaryFn::Neg;
  ExprPtr lhs;
  ExprPtr rhs;
};

ExprPtr make_number(double v);
ExprPtr make_var(int index0);
ExprPtr make_binary(Expr::Kind op, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_pow(ExprPtr base, int exponent);
ExprPtr make_unary(UnaryFn fn, ExprPtr arg);

// Parses one semicolon-separated map. Throws ParseError with the offending offset.
std::vector<ExprPtr> parse_map_text(const std::string& text);

// Fully parenthesized round-trippable form; numbers printed with max precision.
std::string to_text(const Expr& e);
std::string map_to_text(std::span<const ExprPtr> components);

int max_variable(const Expr& e);  // 0 when no variable occurs, else 1-based max index
bool contains_abs(const Expr& e);

namespace detail {

template <typename T>
T powi(T base, int exponent) {
  if (exponent == 0) return T(1.0);
  bool invert = exponent < 0;
  unsigned long long k = invert ? static_cast<unsigned long long>(-(long long)exponent)
                                : static_cast<unsigned long long>(exponent);
  T acc(1.0);
  T cur = base;
  while (k != 0) {
    if (k & 1ull) acc = acc * cur;
    cur = cur * cur;
    k >>= 1;
  }
  if (invert) {
    if (value_of(acc) == 0.0) throw EvalError("zero raised to a negative power");
    return T(1.0) / acc;
  }
  return acc;
}

}  // namespace detail

template <typename T>
T eval_expr(const Expr& e, std::span<const T> x) {
  using std::abs;
  using std::cos;
  using std::exp;
  using std::sin;
  using std::tanh;
  switch (e.kind) {
    case Expr::Kind::Number:
      return T(e.number);
    case Expr::Kind::Var:
      return x[static_cast<std::size_t>(e.var)];
    case Expr::Kind::Add:
      return eval_expr(*e.lhs, x) + eval_expr(*e.rhs, x);
    case Expr::Kind::Sub:
      return eval_expr(*e.lhs, x) - eval_expr(*e.rhs, x);
    case Expr::Kind::Mul:
      return eval_expr(*e.lhs, x) * eval_expr(*e.rhs, x);
    case Expr::Kind::Div: {
      T num = eval_expr(*e.lhs, x);
      T den = eval_expr(*e.rhs, x);
      if (value_of(den) == 0.0) throw EvalError("division by zero");
      return num / den;
    }
    case Expr::Kind::Pow:
      return detail::powi(eval_expr(*e.lhs, x), e.exponent);
    case Expr::Kind::Unary: {
      T arg = eval_expr(*e.lhs, x);
      if (!std::isfinite(value_of(arg))) throw EvalError("non-finite function argument");
      switch (e.fn) {
        case UnaryFn::Neg:
          return -arg;
        case UnaryFn::Sin:
          return sin(arg);
        case UnaryFn::Cos:
          return cos(arg);
        case UnaryFn::Exp:
          return exp(arg);
        case UnaryFn::Tanh:
          return tanh(arg);
        case UnaryFn::Abs:
          return abs(arg);
      }
      return T(0.0);
    }
  }
  return T(0.0);
}

}  // namespace miranda
