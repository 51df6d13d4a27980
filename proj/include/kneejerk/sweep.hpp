#pragma once

// Data-parallel kernels (OpenMP) with a serial reference path. Both paths
// compute per-sample results independently and reduce them in index order,
// so their outputs are bitwise identical.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "kneejerk/diagnostics.hpp"
#include "kneejerk/expr.hpp"
#include "kneejerk/simplex.hpp"

namespace kj {

enum class Exec { serial, parallel };

struct VerifyOptions {
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  std::size_t argmax_competitors = 1000;
  bool concavity = false;
  bool inject_negative = false;  // run the non-knee-jerk fixture through the convexity probe
};

struct VerifySummary {
  std::size_t samples = 0;
  std::uint64_t seed = 0;

  InequalityReport worst_inequality;  // smallest margin
  std::vector<double> worst_inequality_point;
  double min_rhs = 0.0;
  bool inequality_pass = true;

  ArgmaxReport worst_argmax;  // smallest margin
  std::vector<double> worst_argmax_point;
  bool argmax_pass = true;

  ConvexityReport convexity;
  std::optional<ConvexityReport> concavity;
  std::optional<ConvexityReport> negative_control;

  bool pass() const;
};

/// Runs the step inequality, argmax and curvature probes at `samples` seeded
/// interior points of `s`. Sample k draws from Rng(seed, k).
VerifySummary verify_sweep(const Expr& e, const BlockStructure& s, const VerifyOptions& opt,
                           Exec exec = Exec::parallel);

/// Number of grid points: prod_i C(resolution + n_i - 1, n_i - 1), saturating
/// at SIZE_MAX.
std::size_t grid_size(const BlockStructure& s, std::size_t resolution);

struct GridResult {
  std::vector<double> best_point;
  std::vector<std::size_t> best_counts;  // a_{i,j} x_{i,j} = counts / resolution
  double best_w = 0.0;
  std::size_t best_index = 0;
  std::size_t points = 0;
};

/// Exhaustive search over the grid { a_{i,j} x_{i,j} = k_{i,j} / resolution }.
/// Ties go to the smallest grid index.
GridResult grid_search(const Expr& e, const BlockStructure& s, std::size_t resolution,
                       Exec exec = Exec::parallel);

/// Grid point with the given per-coordinate counts.
std::vector<double> grid_point(const BlockStructure& s, std::size_t resolution,
                               const std::vector<std::size_t>& counts);

}  // namespace kj
