#pragma once

// Knee-jerk functions as expression trees over the closure operations
// (variables, positive constants, sums, products, positive powers), with
// log-domain evaluation and reverse-mode differentiation in u = log x.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kj {

enum class NodeKind { var, constant, sum, prod, pow };

const char* to_string(NodeKind kind);

/// Structured description of an expression. Plain value type; validated when
/// compiled into an Expr.
struct NodeSpec {
  NodeKind kind = NodeKind::constant;
  std::size_t index = 0;  // var
  double value = 1.0;     // constant value, or exponent for pow
  std::vector<NodeSpec> children;

  friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

NodeSpec var(std::size_t index);
NodeSpec constant(double c);
NodeSpec sum(std::vector<NodeSpec> children);
NodeSpec prod(std::vector<NodeSpec> children);
NodeSpec pow(NodeSpec base, double exponent);

/// W = log Z and g_i = (log Z)_{u_i} = x_i Z_{x_i} / Z.
struct LogEval {
  double w = 0.0;
  std::vector<double> g;
};

/// Immutable, validated knee-jerk expression in `dimension` variables.
/// Copies share the compiled tape.
class Expr {
 public:
  /// Validates `root` against the invariants (positive constants and
  /// exponents, nonempty sums/products, indices < dimension) and compiles it.
  /// Throws ValidationError naming the offending node.
  static Expr build(NodeSpec root, std::size_t dimension);

  std::size_t dimension() const;
  const NodeSpec& spec() const;
  std::size_t node_count() const;

  friend bool operator==(const Expr& a, const Expr& b);

  struct Tape;  // compiled form, private to expr.cpp

 private:
  explicit Expr(std::shared_ptr<const Tape> tape);

  std::shared_ptr<const Tape> tape_;

  friend LogEval eval_log_coords(const Expr&, std::span<const double>);
};

/// Log-domain evaluation at a point of the open orthant. Throws DomainError
/// if some x_i <= 0 (or is not finite) and ValidationError on a size mismatch.
LogEval eval_log(const Expr& e, std::span<const double> x);

/// Same as eval_log but in u = log x coordinates.
LogEval eval_log_u(const Expr& e, std::span<const double> u);

/// Evaluation on the closed orthant. Zero coordinates are allowed and carry
/// g_i = 0; if Z vanishes at x then W = -inf and g is all zeros.
LogEval eval_log_closed(const Expr& e, std::span<const double> x);

/// Core kernel: evaluation from log-coordinates where entries may be -inf.
LogEval eval_log_coords(const Expr& e, std::span<const double> log_x);

inline constexpr double default_hessian_step = 1e-4;

/// Central-difference Hessian of W in u-coordinates at x (x in the open
/// orthant), built from differences of the exact gradient and symmetrized.
Eigen::MatrixXd hessian_log_u(const Expr& e, std::span<const double> x,
                              double h = default_hessian_step);

}  // namespace kj
