#pragma once

// The knee-jerk mapping. One rule covers the plain simplex, the weighted
// simplex and products of simplices:
//
//   x'_{i,j} = (g_{i,j} / a_{i,j}) / sum_j g_{i,j},   g = x * grad Z / Z.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "kneejerk/expr.hpp"
#include "kneejerk/simplex.hpp"

namespace kj {

struct StepResult {
  BlockPoint next;
  double w_before = 0.0;
  double w_after = 0.0;
  std::vector<double> block_mass;   // m_i = sum_j g_{i,j}
  std::vector<double> block_div;    // I((a x')_i; (a x)_i)
  double bound = 0.0;               // sum_i m_i * block_div[i]
  std::vector<bool> degenerate;     // block had zero gradient mass
  LogEval eval;                     // at the input point

  double divergence() const;
  bool any_degenerate() const;
};

StepResult knee_jerk_step(const Expr& e, const BlockPoint& x);

/// max over blocks of max_j |g_{i,j} / (a_{i,j} x_{i,j}) - m_i| / (m_i + 1).
/// Throws DomainError at boundary points.
double criticality_residual(const Expr& e, const BlockPoint& x);

/// Residual from an already computed gradient.
double criticality_residual(const BlockPoint& x, const std::vector<double>& g);

struct IterationConfig {
  std::size_t max_iters = 100000;
  double tol_div = 1e-12;
  double tol_w = 1e-14;
  std::size_t stride = 1;

  void validate() const;
};

enum class Status { converged, max_iterations, degenerate };

const char* to_string(Status s);

struct TraceRecord {
  std::size_t iter = 0;
  double w = 0.0;           // at the iterate before the step
  double bound = 0.0;
  double divergence = 0.0;  // I(x'; x) of this step
  double residual = 0.0;    // NaN when the iterate is on the boundary
};

struct Trace {
  BlockPoint terminal;
  std::vector<TraceRecord> records;
  Status status = Status::max_iterations;
  std::size_t iterations = 0;  // steps taken
  double terminal_w = 0.0;
  double terminal_residual = 0.0;  // NaN on the boundary
};

Trace iterate(const Expr& e, const BlockPoint& x0, const IterationConfig& cfg = {});

/// CSV with header `iter,W,bound,divergence,residual` and a trailing
/// `# status=...` metadata line.
void write_trace_csv(std::ostream& os, const Trace& trace);

}  // namespace kj
