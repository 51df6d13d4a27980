#pragma once

// Runtime-checkable certificates for the knee-jerk step, and numerical
// curvature probes for log-log-convexity and log-concavity.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kneejerk/expr.hpp"
#include "kneejerk/simplex.hpp"

namespace kj {

inline constexpr double inequality_slack = 1e-9;
inline constexpr double bound_slack = 1e-12;
inline constexpr double argmax_slack = 1e-9;
inline constexpr double eigenvalue_slack = 1e-6;

struct InequalityReport {
  double lhs = 0.0;     // log(Z'/Z)
  double rhs = 0.0;     // sum_i m_i I((a x')_i; (a x)_i)
  double margin = 0.0;  // lhs - rhs
  bool pass = false;
};

struct ArgmaxReport {
  double bound_at_next = 0.0;          // tangent bound at x'
  double worst_competitor_bound = 0.0;
  std::vector<double> worst_competitor;
  double margin = 0.0;  // bound_at_next - worst_competitor_bound
  bool pass = false;
};

struct ConvexityReport {
  std::size_t samples = 0;
  double worst_eigenvalue = 0.0;  // min eigenvalue (convexity) / max (concavity)
  std::vector<double> worst_point;
  bool pass = false;
};

struct Box {
  double lo;
  double hi;
};

inline constexpr Box default_u_box{-3.0, 3.0};
inline constexpr Box default_x_box{0.05, 2.0};

/// sum_i g_i log(xbar_i / x_i) with g the u-gradient at x. Returns -inf when
/// xbar_i = 0 meets g_i > 0.
double tangent_lower_bound(std::span<const double> g, std::span<const double> x,
                           std::span<const double> xbar);
double tangent_lower_bound(const Expr& e, std::span<const double> x,
                           std::span<const double> xbar);

InequalityReport verify_step_inequality(const Expr& e, const BlockPoint& x);

/// Samples `samples` flat-Dirichlet competitors and checks that the step
/// target dominates all of them in tangent bound.
ArgmaxReport verify_argmax_property(const Expr& e, const BlockPoint& x, std::size_t samples,
                                    std::uint64_t seed = 0);

/// A function known only through (log value, u-gradient) at points of the
/// open orthant. Expressions convert to this; so do the negative fixtures.
struct LogFunction {
  std::size_t dimension = 0;
  std::function<LogEval(std::span<const double>)> eval;
};

LogFunction as_log_function(const Expr& e);

/// Hessian of log Z in x-coordinates by central differences of the exact
/// gradient, with relative steps h * x_i, symmetrized.
Eigen::MatrixXd hessian_log_x(const LogFunction& f, std::span<const double> x,
                              double h = default_hessian_step);
Eigen::MatrixXd hessian_log_u(const LogFunction& f, std::span<const double> x,
                              double h = default_hessian_step);

/// Smallest and largest eigenvalue and the spectral norm of a symmetric matrix.
struct Spectrum {
  double min = 0.0;
  double max = 0.0;
  double norm = 0.0;
};
Spectrum spectrum(const Eigen::MatrixXd& h);

bool convex_enough(const Spectrum& s);
bool concave_enough(const Spectrum& s);

ConvexityReport check_log_log_convexity(const LogFunction& f, std::size_t samples,
                                        Box u_box = default_u_box, std::uint64_t seed = 0);
ConvexityReport check_log_log_convexity(const Expr& e, std::size_t samples,
                                        Box u_box = default_u_box, std::uint64_t seed = 0);

ConvexityReport check_log_concavity(const LogFunction& f, std::size_t samples,
                                    Box x_box = default_x_box, std::uint64_t seed = 0);
ConvexityReport check_log_concavity(const Expr& e, std::size_t samples,
                                    Box x_box = default_x_box, std::uint64_t seed = 0);

namespace testing {

/// Z = x y / (x + y): increasing but log-log-concave, so not knee-jerk.
/// Only for negative controls of the curvature probes.
LogFunction harmonic_mean_fixture();

}  // namespace testing

}  // namespace kj
