#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "contactdyn/errors.hpp"
#include "contactdyn/jet.hpp"

namespace contactdyn {

/// Smooth primitives shared by the expression language and builtin fields.
namespace smooth {

/// exp(-1/s) for s > 0, else 0.
inline double glue(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
inline double glue_d(double s) { return s > 0.0 ? std::exp(-1.0 / s) / (s * s) : 0.0; }

/// C-infinity step: 0 for u <= 0, 1 for u >= 1, step(u) + step(1 - u) = 1.
inline double step(double u) {
  const double a = glue(u), b = glue(1.0 - u);
  return a / (a + b);
}
inline double step_d(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  const double a = glue(u), b = glue(1.0 - u);
  const double da = glue_d(u), db = -glue_d(1.0 - u);
  return (da * b - a * db) / ((a + b) * (a + b));
}

/// Standard bump exp(1 - 1/(1 - u^2)) on (-1, 1), value 1 at 0.
inline double bump(double u) {
  if (u <= -1.0 || u >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}
inline double bump_d(double u) {
  if (u <= -1.0 || u >= 1.0) return 0.0;
  const double q = 1.0 - u * u;
  return bump(u) * (-2.0 * u / (q * q));
}

inline double apply_step(double u) { return step(u); }
inline Jet apply_step(const Jet& u) { return u.chain(step(u.v), step_d(u.v)); }
inline double apply_bump(double u) { return bump(u); }
inline Jet apply_bump(const Jet& u) { return u.chain(bump(u.v), bump_d(u.v)); }

}  // namespace smooth

/**
 * Parsed scalar expression over a fixed list of variable names.
 *
 * Grammar (see docs/grammar.md):
 *   expr    = term { ("+" | "-") term }
 *   term    = unary { ("*" | "/") unary }
 *   unary   = ("+" | "-") unary | power
 *   power   = primary [ "^" unary ]
 *   primary = number | identifier | identifier "(" expr { "," expr } ")" | "(" expr ")"
 */
class Expr {
 public:
  enum class Op {
    Const, Var, Add, Sub, Mul, Div, Neg, Pow,
    Sin, Cos, Tan, Exp, Log, Tanh, Sqrt, Bump, Sigmoid,
  };

  struct Node {
    Op op = Op::Const;
    double value = 0.0;
    int var = -1;
    int a = -1;
    int b = -1;
  };

  /// Parses `text`; identifiers must be in `variables` or be pi / e.
  static Expr parse(std::string_view text, const std::vector<std::string>& variables);

  /// Fully parenthesized canonical form; parse(print()) reproduces the tree.
  std::string print() const;

  template <class T>
  T eval(const T* vars) const {
    return eval_node<T>(root_, vars);
  }

  const std::vector<std::string>& variables() const noexcept { return vars_; }
  /// True if the variable with this index occurs in the tree.
  bool uses(int var) const;
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

 private:
  template <class T>
  T eval_node(int i, const T* vars) const;
  std::string print_node(int i) const;

  std::vector<Node> nodes_;
  int root_ = -1;
  std::vector<std::string> vars_;
  friend class ExprParser;
};

template <class T>
T Expr::eval_node(int i, const T* vars) const {
  using std::cos;
  using std::exp;
  using std::log;
  using std::pow;
  using std::sin;
  using std::sqrt;
  using std::tan;
  using std::tanh;
  const Node& n = nodes_[static_cast<std::size_t>(i)];
  switch (n.op) {
    case Op::Const: return T(n.value);
    case Op::Var: return vars[n.var];
    case Op::Add: return eval_node<T>(n.a, vars) + eval_node<T>(n.b, vars);
    case Op::Sub: return eval_node<T>(n.a, vars) - eval_node<T>(n.b, vars);
    case Op::Mul: return eval_node<T>(n.a, vars) * eval_node<T>(n.b, vars);
    case Op::Div: return eval_node<T>(n.a, vars) / eval_node<T>(n.b, vars);
    case Op::Neg: return -eval_node<T>(n.a, vars);
    case Op::Pow: return pow(eval_node<T>(n.a, vars), eval_node<T>(n.b, vars));
    case Op::Sin: return sin(eval_node<T>(n.a, vars));
    case Op::Cos: return cos(eval_node<T>(n.a, vars));
    case Op::Tan: return tan(eval_node<T>(n.a, vars));
    case Op::Exp: return exp(eval_node<T>(n.a, vars));
    case Op::Log: return log(eval_node<T>(n.a, vars));
    case Op::Tanh: return tanh(eval_node<T>(n.a, vars));
    case Op::Sqrt: return sqrt(eval_node<T>(n.a, vars));
    case Op::Bump: return smooth::apply_bump(eval_node<T>(n.a, vars));
    case Op::Sigmoid: return smooth::apply_step(eval_node<T>(n.a, vars));
  }
  return T(0.0);
}

}  // namespace contactdyn
