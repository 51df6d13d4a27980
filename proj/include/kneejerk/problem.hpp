#pragma once

// Problem files and the batch drivers behind the command-line tool.
//
// Problem schema:
//   {
//     "expression": {...tree...} | "polynomial": {...} | "graph": {...},
//     "blocks":  [int, ...],            optional, default one block
//     "weights": [number, ...],         optional, default all ones
//     "init":    [number, ...] | "barycenter",   optional, default barycenter
//     "config":  {"max_iters": int, "tol_div": number, "tol_w": number,
//                 "stride": int}        optional
//   }
// "expression" may also wrap {"polynomial": ...} or {"graph": ...}.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kneejerk/discriminant.hpp"
#include "kneejerk/expr.hpp"
#include "kneejerk/io.hpp"
#include "kneejerk/mapping.hpp"
#include "kneejerk/polynomial.hpp"
#include "kneejerk/simplex.hpp"
#include "kneejerk/sweep.hpp"

namespace kj {

using ProblemSource = std::variant<NodeSpec, SparsePolynomial, Graph>;

struct Problem {
  ProblemSource source;
  Expr expr;
  BlockStructure structure;
  std::optional<std::vector<double>> init;  // nullopt: barycenter
  BlockPoint initial_point;
  IterationConfig config;

  friend bool operator==(const Problem& a, const Problem& b);
};

/// Exit codes of the command-line tool.
enum ExitCode : int { exit_ok = 0, exit_verify_failed = 1, exit_input_error = 2, exit_degenerate = 3 };

Problem parse_problem(std::string_view text);
Problem load_problem(const std::filesystem::path& path);

json problem_to_json(const Problem& p);
std::string serialize_problem(const Problem& p);

/// Overrides from the command line; unset fields keep the file's values.
struct ConfigOverrides {
  std::optional<std::size_t> max_iters;
  std::optional<double> tol_div;
  std::optional<double> tol_w;
};
void apply_overrides(Problem& p, const ConfigOverrides& o);

struct OptimizeOutcome {
  Trace trace;
  json summary;
  int exit_code = exit_ok;
};

OptimizeOutcome run_optimize(const Problem& p);

struct VerifyOutcome {
  VerifySummary summary;
  json report;
  int exit_code = exit_ok;
};

VerifyOutcome run_verify(const Problem& p, const VerifyOptions& opt, Exec exec = Exec::parallel);

inline constexpr std::size_t oracle_grid_limit = 100'000'000;

struct OracleResult {
  std::vector<double> best_point;
  double best_w = 0.0;
  std::size_t resolution = 0;
  std::size_t points = 0;
  double terminal_w = 0.0;
  std::vector<double> terminal_point;
  double gap = 0.0;          // terminal W - best grid W
  double error_bound = 0.0;  // resolution-derived bound on |gap|
  bool within_bound = false;
};

/// Brute-force grid maximizer compared with the iteration's terminal point.
/// Throws InputError when the grid exceeds oracle_grid_limit.
OracleResult run_oracle(const Problem& p, std::size_t resolution, Exec exec = Exec::parallel);

json to_json(const OracleResult& r);
json to_json(const VerifySummary& s);

}  // namespace kj
