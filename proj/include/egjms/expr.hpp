#pragma once

// Expression trees over the variables x1..x9, u1..u9 and their evaluation
// over jets.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "egjms/jet.hpp"

namespace egjms {

enum class NodeKind { Number, Pi, VarX, VarU, Add, Sub, Mul, Div, Neg, Pow, Func };
enum class FuncKind { Sin, Cos, Exp, Log, Sqrt, Tanh, Atan };

struct ExprNode {
  NodeKind kind = NodeKind::Number;
  double number = 0.0;        // Number
  int index = 0;              // VarX / VarU (one-based), Pow exponent
  FuncKind func = FuncKind::Sin;
  std::shared_ptr<const ExprNode> lhs;  // unary argument or left operand
  std::shared_ptr<const ExprNode> rhs;
};

using NodePtr = std::shared_ptr<const ExprNode>;

/// Value handle around a shared, immutable node.
class Expr {
 public:
  Expr() : Expr(constant(0.0)) {}
  explicit Expr(NodePtr node) : node_(std::move(node)) {}

  static Expr constant(double v);
  static Expr pi();
  static Expr x(int i);
  static Expr u(int j);
  static Expr func(FuncKind f, const Expr& arg);

  const ExprNode& node() const { return *node_; }
  const NodePtr& ptr() const { return node_; }

  /// Largest x and u index referenced, zero if none.
  int max_x_index() const;
  int max_u_index() const;

  std::string to_string() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& a, int exponent);

 private:
  NodePtr node_;
};

Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);
Expr tanh(const Expr& a);
Expr atan(const Expr& a);

/// Parses the expression grammar. Throws ParseError with line and column.
Expr parse_expression(std::string_view text);

/// Binds x_i and u_j to jets and evaluates. Shared subtrees are evaluated
/// once per evaluator; reuse an evaluator across expressions that share
/// nodes with the same binding.
class JetEvaluator {
 public:
  JetEvaluator(std::vector<Jet> x, std::vector<Jet> u = {});

  Jet operator()(const Expr& e);

  int dim() const { return dim_; }
  int order() const { return order_; }

 private:
  Jet eval(const ExprNode& n);

  std::vector<Jet> x_;
  std::vector<Jet> u_;
  int dim_;
  int order_;
  std::unordered_map<const ExprNode*, Jet> memo_;
  std::vector<NodePtr> keep_alive_;
};

/// Evaluates e at a point with x_i = point[i-1]; any u_j reads point[xcount + j - 1].
Jet evaluate(const Expr& e, std::span<const double> point, int order, int xcount = -1);

}  // namespace egjms
