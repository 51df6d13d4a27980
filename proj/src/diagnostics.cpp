#include "kneejerk/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "kneejerk/error.hpp"
#include "kneejerk/mapping.hpp"
#include "kneejerk/random.hpp"

namespace kj {

double tangent_lower_bound(std::span<const double> g, std::span<const double> x,
                           std::span<const double> xbar) {
  if (g.size() != x.size() || xbar.size() != x.size()) {
    throw ValidationError("tangent bound arguments differ in length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (g[i] == 0.0) continue;
    if (xbar[i] == 0.0) return -std::numeric_limits<double>::infinity();
    total += g[i] * std::log(xbar[i] / x[i]);
  }
  return total;
}

double tangent_lower_bound(const Expr& e, std::span<const double> x,
                           std::span<const double> xbar) {
  return tangent_lower_bound(eval_log(e, x).g, x, xbar);
}

InequalityReport verify_step_inequality(const Expr& e, const BlockPoint& x) {
  if (!x.interior()) throw DomainError("the step inequality is checked at interior points");
  const StepResult step = knee_jerk_step(e, x);
  InequalityReport r;
  r.lhs = step.w_after - step.w_before;
  r.rhs = step.bound;
  r.margin = r.lhs - r.rhs;
  r.pass = r.margin >= -inequality_slack;
  return r;
}

ArgmaxReport verify_argmax_property(const Expr& e, const BlockPoint& x, std::size_t samples,
                                    std::uint64_t seed) {
  if (!x.interior()) throw DomainError("the argmax property is checked at interior points");
  if (samples < 1) throw ValidationError("argmax check needs at least one sample");
  const StepResult step = knee_jerk_step(e, x);
  const auto& g = step.eval.g;
  ArgmaxReport r;
  r.bound_at_next = tangent_lower_bound(g, x.coords(), step.next.coords());
  r.worst_competitor_bound = -std::numeric_limits<double>::infinity();
  Rng rng(seed, 0x61726778ull);
  for (std::size_t k = 0; k < samples; ++k) {
    const BlockPoint c = random_interior_point(rng, x.structure());
    const double b = tangent_lower_bound(g, x.coords(), c.coords());
    if (b > r.worst_competitor_bound) {
      r.worst_competitor_bound = b;
      r.worst_competitor.assign(c.coords().begin(), c.coords().end());
    }
  }
  r.margin = r.bound_at_next - r.worst_competitor_bound;
  r.pass = r.margin >= -argmax_slack;
  return r;
}

LogFunction as_log_function(const Expr& e) {
  return LogFunction{e.dimension(), [e](std::span<const double> x) { return eval_log(e, x); }};
}

Eigen::MatrixXd hessian_log_x(const LogFunction& f, std::span<const double> x, double h) {
  const std::size_t n = f.dimension;
  if (x.size() != n) throw ValidationError("point dimension mismatch");
  Eigen::MatrixXd H(n, n);
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t i = 0; i < n; ++i) {
    const double step = h * x[i];
    probe[i] = x[i] + step;
    const LogEval up = f.eval(probe);
    const std::vector<double> up_x = probe;
    probe[i] = x[i] - step;
    const LogEval down = f.eval(probe);
    for (std::size_t j = 0; j < n; ++j) {
      // d/dx_j log Z = g_j / x_j
      H(i, j) = (up.g[j] / up_x[j] - down.g[j] / probe[j]) / (2.0 * step);
    }
    probe[i] = x[i];
  }
  return 0.5 * (H + H.transpose());
}

Eigen::MatrixXd hessian_log_u(const LogFunction& f, std::span<const double> x, double h) {
  const std::size_t n = f.dimension;
  if (x.size() != n) throw ValidationError("point dimension mismatch");
  Eigen::MatrixXd H(n, n);
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t i = 0; i < n; ++i) {
    probe[i] = x[i] * std::exp(h);
    const LogEval up = f.eval(probe);
    probe[i] = x[i] * std::exp(-h);
    const LogEval down = f.eval(probe);
    probe[i] = x[i];
    for (std::size_t j = 0; j < n; ++j) H(i, j) = (up.g[j] - down.g[j]) / (2.0 * h);
  }
  return 0.5 * (H + H.transpose());
}

Spectrum spectrum(const Eigen::MatrixXd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  Spectrum s;
  s.min = ev.minCoeff();
  s.max = ev.maxCoeff();
  s.norm = std::max(std::abs(s.min), std::abs(s.max));
  return s;
}

bool convex_enough(const Spectrum& s) { return s.min >= -eigenvalue_slack * (1.0 + s.norm); }
bool concave_enough(const Spectrum& s) { return s.max <= eigenvalue_slack * (1.0 + s.norm); }

namespace {

enum class Probe { convexity, concavity };

template <typename HessianAt>
ConvexityReport run_probe(std::size_t dimension, std::size_t samples, Box box, std::uint64_t seed,
                          Probe kind, bool box_in_u, HessianAt&& hessian_at) {
  if (samples < 1) throw ValidationError("probe needs at least one sample");
  if (!(box.lo < box.hi)) throw ValidationError("probe box is empty");
  if (!box_in_u && !(box.lo > 0.0)) throw ValidationError("x-box must lie in the open orthant");
  Rng rng(seed, kind == Probe::convexity ? 0x636f6e76ull : 0x63617665ull);
  ConvexityReport r;
  r.samples = samples;
  r.pass = true;
  double worst_scaled = std::numeric_limits<double>::infinity();
  std::vector<double> x(dimension);
  for (std::size_t k = 0; k < samples; ++k) {
    for (auto& xi : x) {
      const double t = rng.uniform(box.lo, box.hi);
      xi = box_in_u ? std::exp(t) : t;
    }
    const Spectrum s = spectrum(hessian_at(x));
    // Signed so that smaller is worse for both probes.
    const double eig = kind == Probe::convexity ? s.min : -s.max;
    const double scaled = eig / (1.0 + s.norm);
    const bool ok = kind == Probe::convexity ? convex_enough(s) : concave_enough(s);
    if (!ok) r.pass = false;
    if (scaled < worst_scaled) {
      worst_scaled = scaled;
      r.worst_eigenvalue = kind == Probe::convexity ? s.min : s.max;
      r.worst_point = x;
    }
  }
  return r;
}

}  // namespace

ConvexityReport check_log_log_convexity(const LogFunction& f, std::size_t samples, Box u_box,
                                        std::uint64_t seed) {
  return run_probe(f.dimension, samples, u_box, seed, Probe::convexity, true,
                   [&](std::span<const double> x) { return hessian_log_u(f, x); });
}

ConvexityReport check_log_log_convexity(const Expr& e, std::size_t samples, Box u_box,
                                        std::uint64_t seed) {
  return run_probe(e.dimension(), samples, u_box, seed, Probe::convexity, true,
                   [&](std::span<const double> x) { return hessian_log_u(e, x); });
}

ConvexityReport check_log_concavity(const LogFunction& f, std::size_t samples, Box x_box,
                                    std::uint64_t seed) {
  return run_probe(f.dimension, samples, x_box, seed, Probe::concavity, false,
                   [&](std::span<const double> x) { return hessian_log_x(f, x); });
}

ConvexityReport check_log_concavity(const Expr& e, std::size_t samples, Box x_box,
                                    std::uint64_t seed) {
  return check_log_concavity(as_log_function(e), samples, x_box, seed);
}

namespace testing {

LogFunction harmonic_mean_fixture() {
  return LogFunction{2, [](std::span<const double> x) {
                       if (x.size() != 2 || !(x[0] > 0.0) || !(x[1] > 0.0)) {
                         throw DomainError("harmonic fixture needs a point of the open quadrant");
                       }
                       const double s = x[0] + x[1];
                       LogEval r;
                       r.w = std::log(x[0]) + std::log(x[1]) - std::log(s);
                       r.g = {x[1] / s, x[0] / s};
                       return r;
                     }};
}

}  // namespace testing

}  // namespace kj
