#include "kneejerk/mapping.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "kneejerk/error.hpp"

namespace kj {

double StepResult::divergence() const {
  double total = 0.0;
  for (double d : block_div) total += d;
  return total;
}

bool StepResult::any_degenerate() const {
  for (bool d : degenerate) {
    if (d) return true;
  }
  return false;
}

StepResult knee_jerk_step(const Expr& e, const BlockPoint& x) {
  const BlockStructure& s = x.structure();
  if (e.dimension() != s.dimension()) {
    throw ValidationError("expression has dimension " + std::to_string(e.dimension()) +
                          " but the point has " + std::to_string(s.dimension()));
  }
  LogEval ev = eval_log_closed(e, x.coords());
  const auto a = s.weights();
  const std::size_t k = s.block_count();

  std::vector<double> next(x.coords().begin(), x.coords().end());
  std::vector<double> mass(k, 0.0);
  std::vector<bool> degenerate(k, false);
  for (std::size_t b = 0; b < k; ++b) {
    const std::size_t off = s.block_offset(b);
    const std::size_t end = off + s.block_size(b);
    double m = 0.0;
    for (std::size_t j = off; j < end; ++j) m += ev.g[j];
    mass[b] = m;
    if (m > 0.0) {
      for (std::size_t j = off; j < end; ++j) next[j] = ev.g[j] / a[j] / m;
    } else {
      // Zero gradient mass: renormalize the block in place (x already
      // satisfies the constraint, so this leaves it unchanged).
      degenerate[b] = true;
    }
  }

  BlockPoint x_next(s, std::move(next));
  const double w_after = eval_log_closed(e, x_next.coords()).w;
  std::vector<double> div = block_divergences(x_next.coords(), x.coords(), s);
  double bound = 0.0;
  for (std::size_t b = 0; b < k; ++b) {
    if (mass[b] > 0.0) bound += mass[b] * div[b];
  }
  return StepResult{std::move(x_next), ev.w,           w_after, std::move(mass), std::move(div),
                    bound,             std::move(degenerate), std::move(ev)};
}

double criticality_residual(const BlockPoint& x, const std::vector<double>& g) {
  if (!x.interior()) {
    throw DomainError("criticality residual is defined on the open feasible set only");
  }
  const BlockStructure& s = x.structure();
  const auto a = s.weights();
  double worst = 0.0;
  for (std::size_t b = 0; b < s.block_count(); ++b) {
    const std::size_t off = s.block_offset(b);
    const std::size_t end = off + s.block_size(b);
    double m = 0.0;
    for (std::size_t j = off; j < end; ++j) m += g[j];
    for (std::size_t j = off; j < end; ++j) {
      const double r = std::abs(g[j] / (a[j] * x[j]) - m) / (m + 1.0);
      if (r > worst) worst = r;
    }
  }
  return worst;
}

double criticality_residual(const Expr& e, const BlockPoint& x) {
  if (!x.interior()) {
    throw DomainError("criticality residual is defined on the open feasible set only");
  }
  return criticality_residual(x, eval_log(e, x.coords()).g);
}

void IterationConfig::validate() const {
  if (max_iters < 1) throw ValidationError("max_iters must be at least 1");
  if (!(tol_div > 0.0)) throw ValidationError("tol_div must be positive");
  if (!(tol_w > 0.0)) throw ValidationError("tol_w must be positive");
  if (stride < 1) throw ValidationError("trace stride must be at least 1");
}

const char* to_string(Status s) {
  switch (s) {
    case Status::converged: return "converged";
    case Status::max_iterations: return "max-iterations";
    case Status::degenerate: return "degenerate";
  }
  return "?";
}

Trace iterate(const Expr& e, const BlockPoint& x0, const IterationConfig& cfg) {
  cfg.validate();
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  Trace trace{x0, {}};
  BlockPoint x = x0;
  bool last_recorded = false;
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    StepResult step = knee_jerk_step(e, x);
    TraceRecord rec{it, step.w_before, step.bound, step.divergence(),
                    x.interior() ? criticality_residual(x, step.eval.g) : nan};
    last_recorded = it % cfg.stride == 0;
    if (last_recorded) trace.records.push_back(rec);
    trace.iterations = it + 1;

    const double improvement = step.w_after - step.w_before;
    const bool degenerate = step.any_degenerate();
    const bool small_div = rec.divergence < cfg.tol_div;
    x = std::move(step.next);
    if (degenerate) {
      trace.status = Status::degenerate;
    } else if (small_div || improvement < cfg.tol_w) {
      trace.status = Status::converged;
    }
    if (degenerate || trace.status == Status::converged) {
      if (!last_recorded) trace.records.push_back(rec);
      last_recorded = true;
      break;
    }
    if (it + 1 == cfg.max_iters && !last_recorded) trace.records.push_back(rec);
  }

  const LogEval final_eval = eval_log_closed(e, x.coords());
  trace.terminal_w = final_eval.w;
  trace.terminal_residual = x.interior() ? criticality_residual(x, final_eval.g) : nan;
  trace.terminal = std::move(x);
  return trace;
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  char buf[160];
  os << "iter,W,bound,divergence,residual\n";
  for (const auto& r : trace.records) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", r.iter, r.w, r.bound,
                  r.divergence, r.residual);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "# status=%s iterations=%zu terminal_W=%.17g\n",
                to_string(trace.status), trace.iterations, trace.terminal_w);
  os << buf;
}

}  // namespace kj
