#pragma once

// Test-side oracles that share no code path with the jet engine.

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "egjms/expr.hpp"
#include "egjms/sampling.hpp"

namespace oracle {

using egjms::Expr;
using egjms::ExprNode;
using egjms::FuncKind;
using egjms::NodeKind;

inline double eval_node(const ExprNode& n, std::span<const double> x, std::span<const double> u) {
  switch (n.kind) {
    case NodeKind::Number: return n.number;
    case NodeKind::Pi: return std::numbers::pi;
    case NodeKind::VarX: return x[static_cast<std::size_t>(n.index - 1)];
    case NodeKind::VarU: return u[static_cast<std::size_t>(n.index - 1)];
    case NodeKind::Add: return eval_node(*n.lhs, x, u) + eval_node(*n.rhs, x, u);
    case NodeKind::Sub: return eval_node(*n.lhs, x, u) - eval_node(*n.rhs, x, u);
    case NodeKind::Mul: return eval_node(*n.lhs, x, u) * eval_node(*n.rhs, x, u);
    case NodeKind::Div: return eval_node(*n.lhs, x, u) / eval_node(*n.rhs, x, u);
    case NodeKind::Neg: return -eval_node(*n.lhs, x, u);
    case NodeKind::Pow: return std::pow(eval_node(*n.lhs, x, u), n.index);
    case NodeKind::Func: {
      const double a = eval_node(*n.lhs, x, u);
      switch (n.func) {
        case FuncKind::Sin: return std::sin(a);
        case FuncKind::Cos: return std::cos(a);
        case FuncKind::Exp: return std::exp(a);
        case FuncKind::Log: return std::log(a);
        case FuncKind::Sqrt: return std::sqrt(a);
        case FuncKind::Tanh: return std::tanh(a);
        case FuncKind::Atan: return std::atan(a);
      }
    }
  }
  throw std::logic_error("unknown node");
}

/// Plain double evaluation of an expression tree.
inline double eval(const Expr& e, std::span<const double> x, std::span<const double> u = {}) {
  return eval_node(e.node(), x, u);
}

using Scalar = std::function<double(const std::vector<double>&)>;

/// Fourth-order central differences.
inline double fd_first(const Scalar& f, std::vector<double> x, int i, double h = 1e-3) {
  auto at = [&](double d) {
    auto y = x;
    y[i] += d;
    return f(y);
  };
  return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
}

inline double fd_second(const Scalar& f, std::vector<double> x, int i, int j, double h = 1e-3) {
  if (i == j) {
    auto at = [&](double d) {
      auto y = x;
      y[i] += d;
      return f(y);
    };
    return (-at(2 * h) + 16 * at(h) - 30 * at(0) + 16 * at(-h) - at(-2 * h)) / (12 * h * h);
  }
  auto g = [&](const std::vector<double>& y) { return fd_first(f, y, j, h); };
  return fd_first(g, x, i, h);
}

/// A random expression tree in x1..x_nvars built from every node kind.
inline Expr random_expression(egjms::Rng& rng, int nvars, int depth) {
  if (depth == 0) {
    if (rng.integer(0, 2) == 0) return Expr::constant(rng.uniform(0.5, 2.0));
    return Expr::x(rng.integer(1, nvars));
  }
  const Expr a = random_expression(rng, nvars, depth - 1);
  const Expr b = random_expression(rng, nvars, depth - 1);
  switch (rng.integer(0, 10)) {
    case 0: return a + b;
    case 1: return a - b;
    case 2: return a * b;
    case 3: return a / (Expr::constant(2.0) + b * b);
    case 4: return pow(a, rng.integer(2, 3));
    case 5: return sin(a);
    case 6: return cos(a) * b;
    case 7: return exp(Expr::constant(0.3) * a);
    case 8: return log(Expr::constant(1.5) + a * a);
    case 9: return sqrt(Expr::constant(1.0) + a * a) + tanh(b);
    default: return atan(a) - Expr::pi() * b;
  }
}

/// Unit-sphere stereographic factor 4/(1+|x|^2)^2 in n variables.
inline Expr stereo_factor(int n) {
  Expr r2 = Expr::constant(0.0);
  for (int i = 1; i <= n; ++i) r2 = r2 + pow(Expr::x(i), 2);
  return Expr::constant(4.0) / pow(Expr::constant(1.0) + r2, 2);
}

/// Inverse stereographic image of the equatorial parametrization
/// (2x, |x|^2 - 1)/(1 + |x|^2) restricted to the sphere: the first three
/// Cartesian coordinates of S^2 in R^3.
inline std::vector<Expr> equator_cartesian() {
  const Expr x1 = Expr::x(1), x2 = Expr::x(2);
  const Expr q = Expr::constant(1.0) + x1 * x1 + x2 * x2;
  return {Expr::constant(2.0) * x1 / q, Expr::constant(2.0) * x2 / q, (x1 * x1 + x2 * x2 - Expr::constant(1.0)) / q};
}

/// Harmonic homogeneous polynomials of degree 1..3 in three variables.
inline Expr harmonic(int m, const std::vector<Expr>& X) {
  switch (m) {
    case 1: return X[0];
    case 2: return X[0] * X[1] + Expr::constant(0.5) * (X[0] * X[0] - X[2] * X[2]);
    case 3: return X[0] * X[1] * X[2] + X[0] * (X[0] * X[0] - Expr::constant(3.0) * X[1] * X[1]);
  }
  throw std::invalid_argument("degree");
}

/// Angle along the great circle parametrized by x1 in the stereographic S^3 chart.
inline Expr circle_angle() { return Expr::constant(2.0) * atan(Expr::x(1)); }

inline double rel(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(a)); }

}  // namespace oracle
