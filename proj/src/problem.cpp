#include "kneejerk/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <regex>
#include <sstream>

#include "kneejerk/error.hpp"

namespace kj {

bool operator==(const Problem& a, const Problem& b) {
  return a.source == b.source && a.structure == b.structure && a.init == b.init &&
         a.config.max_iters == b.config.max_iters && a.config.tol_div == b.config.tol_div &&
         a.config.tol_w == b.config.tol_w && a.config.stride == b.config.stride;
}

namespace {

// Rewrites a node path such as "root.args[1].arg" into the JSON pointer of
// the same node under `where`, e.g. "/expression/args/1/arg".
std::string with_json_path(const std::string& message, const std::string& where) {
  static const std::regex path(R"(root((?:\.args\[\d+\]|\.arg)*))");
  std::smatch m;
  if (!std::regex_search(message, m, path)) return "field " + where + ": " + message;
  std::string pointer = where;
  static const std::regex step(R"(\.(args)\[(\d+)\]|\.(arg))");
  const std::string steps = m[1].str();
  for (auto it = std::sregex_iterator(steps.begin(), steps.end(), step); it != std::sregex_iterator(); ++it) {
    pointer += (*it)[1].matched ? "/args/" + (*it)[2].str() : "/arg";
  }
  return "field " + pointer + ": " + message;
}

struct Resolved {
  ProblemSource source;
  Expr expr;
};

Resolved resolve_source(const json& root) {
  const json* src = nullptr;
  std::string where;
  int found = 0;
  for (const char* key : {"expression", "polynomial", "graph"}) {
    if (root.contains(key)) {
      src = &root[key];
      where = std::string("/") + key;
      ++found;
    }
  }
  if (found != 1) {
    throw InputError("problem needs exactly one of \"expression\", \"polynomial\", \"graph\"");
  }
  // "expression" may wrap a polynomial or a graph.
  if (where == "/expression" && src->is_object() && !src->contains("op")) {
    if (src->contains("polynomial")) {
      src = &(*src)["polynomial"];
      where = "/expression/polynomial";
    } else if (src->contains("graph")) {
      src = &(*src)["graph"];
      where = "/expression/graph";
    }
  }

  const bool is_poly = where.ends_with("polynomial");
  const bool is_graph = where.ends_with("graph");
  if (is_poly) {
    SparsePolynomial p = polynomial_from_json(*src, where);
    Expr e = polynomial_to_expression(p);
    return {std::move(p), std::move(e)};
  }
  if (is_graph) {
    Graph g = graph_from_json(*src, where);
    Expr e = polynomial_to_expression(discriminant_polynomial(g));
    return {std::move(g), std::move(e)};
  }
  NodeSpec spec = node_from_json(*src, where);
  std::size_t n = implied_dimension(spec);
  if (root.contains("blocks")) {
    std::size_t total = 0;
    for (const auto& b : root["blocks"]) {
      if (b.is_number_unsigned()) total += b.get<std::size_t>();
    }
    n = std::max(n, total);
  }
  try {
    Expr e = Expr::build(spec, std::max<std::size_t>(n, 1));
    return {std::move(spec), std::move(e)};
  } catch (const ValidationError& err) {
    throw ValidationError(with_json_path(err.what(), where));
  }
}

IterationConfig config_from_json(const json& root) {
  IterationConfig cfg;
  if (!root.contains("config")) return cfg;
  const json& c = root["config"];
  if (!c.is_object()) throw InputError("field /config: expected an object");
  for (auto it = c.begin(); it != c.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    const std::string where = "/config/" + k;
    if (k == "max_iters" || k == "stride") {
      if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
        throw InputError("field " + where + ": expected a positive integer");
      }
      (k == "max_iters" ? cfg.max_iters : cfg.stride) = v.get<std::size_t>();
    } else if (k == "tol_div" || k == "tol_w") {
      if (!v.is_number() || !(v.get<double>() > 0.0)) {
        throw InputError("field " + where + ": expected a positive number");
      }
      (k == "tol_div" ? cfg.tol_div : cfg.tol_w) = v.get<double>();
    } else {
      throw InputError("field " + where + ": unknown setting");
    }
  }
  return cfg;
}

}  // namespace

Problem parse_problem(std::string_view text) {
  const json root = parse_json_text(text);
  if (!root.is_object()) throw InputError("problem file must hold a JSON object");
  for (auto it = root.begin(); it != root.end(); ++it) {
    static const char* known[] = {"expression", "polynomial", "graph", "blocks",
                                  "weights",    "init",       "config", "name"};
    if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known)) {
      throw InputError("field /" + it.key() + ": unknown field");
    }
  }

  Resolved r = resolve_source(root);
  BlockStructure s = structure_from_json(root, r.expr.dimension());
  if (s.dimension() != r.expr.dimension()) {
    throw ValidationError("field /blocks: block sizes add up to " + std::to_string(s.dimension()) +
                          " but the expression has dimension " +
                          std::to_string(r.expr.dimension()));
  }

  std::optional<std::vector<double>> init;
  if (root.contains("init")) {
    const json& ij = root["init"];
    if (ij.is_string()) {
      if (ij.get<std::string>() != "barycenter") {
        throw InputError("field /init: expected an array or \"barycenter\"");
      }
    } else if (ij.is_array()) {
      std::vector<double> v;
      for (std::size_t i = 0; i < ij.size(); ++i) {
        if (!ij[i].is_number()) throw InputError("field /init/" + std::to_string(i) + ": expected a number");
        v.push_back(ij[i].get<double>());
      }
      init = std::move(v);
    } else {
      throw InputError("field /init: expected an array or \"barycenter\"");
    }
  }

  BlockPoint x0 = [&] {
    if (!init) return barycenter(s);
    try {
      return BlockPoint(s, *init);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("field /init: ") + e.what());
    }
  }();

  return Problem{std::move(r.source), std::move(r.expr), std::move(s), std::move(init),
                 std::move(x0),       config_from_json(root)};
}

Problem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open problem file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str());
}

json problem_to_json(const Problem& p) {
  json j = structure_to_json(p.structure);
  std::visit(
      [&](const auto& src) {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, NodeSpec>) {
          j["expression"] = node_to_json(src);
        } else if constexpr (std::is_same_v<T, SparsePolynomial>) {
          j["polynomial"] = polynomial_to_json(src);
        } else {
          j["graph"] = graph_to_json(src);
        }
      },
      p.source);
  if (p.init) {
    j["init"] = *p.init;
  } else {
    j["init"] = "barycenter";
  }
  j["config"] = {{"max_iters", p.config.max_iters},
                 {"tol_div", p.config.tol_div},
                 {"tol_w", p.config.tol_w},
                 {"stride", p.config.stride}};
  return j;
}

std::string serialize_problem(const Problem& p) { return problem_to_json(p).dump(2) + "\n"; }

void apply_overrides(Problem& p, const ConfigOverrides& o) {
  if (o.max_iters) p.config.max_iters = *o.max_iters;
  if (o.tol_div) p.config.tol_div = *o.tol_div;
  if (o.tol_w) p.config.tol_w = *o.tol_w;
  p.config.validate();
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

OptimizeOutcome run_optimize(const Problem& p) {
  Trace trace = iterate(p.expr, p.initial_point, p.config);
  OptimizeOutcome out{std::move(trace), json::object(), exit_ok};
  const Trace& t = out.trace;
  out.summary = {{"status", to_string(t.status)},
                 {"iterations", t.iterations},
                 {"terminal_point", std::vector<double>(t.terminal.coords().begin(),
                                                        t.terminal.coords().end())},
                 {"W", finite_or_null(t.terminal_w)},
                 {"residual", finite_or_null(t.terminal_residual)}};
  if (t.status == Status::degenerate) {
    out.exit_code = exit_degenerate;
    out.summary["explanation"] =
        "a block had zero gradient mass; it was renormalized in place and iteration stopped";
  }
  return out;
}

json to_json(const VerifySummary& s) {
  json j{{"seed", s.seed},
         {"samples", s.samples},
         {"pass", s.pass()},
         {"inequality",
          {{"pass", s.inequality_pass},
           {"min_rhs", finite_or_null(s.min_rhs)},
           {"worst", to_json(s.worst_inequality)},
           {"worst_point", s.worst_inequality_point}}},
         {"argmax",
          {{"pass", s.argmax_pass},
           {"worst", to_json(s.worst_argmax)},
           {"worst_point", s.worst_argmax_point}}},
         {"log_log_convexity", to_json(s.convexity)}};
  if (s.concavity) j["log_concavity"] = to_json(*s.concavity);
  if (s.negative_control) j["negative_control"] = to_json(*s.negative_control);
  return j;
}

VerifyOutcome run_verify(const Problem& p, const VerifyOptions& opt, Exec exec) {
  VerifySummary summary = verify_sweep(p.expr, p.structure, opt, exec);
  json report = to_json(summary);
  const int code = summary.pass() ? exit_ok : exit_verify_failed;
  return {std::move(summary), std::move(report), code};
}

namespace {

// Largest spread max_j dW/dx_j / a_j - min_j dW/dx_j / a_j over the blocks of
// an interior point; dW/dx_j = g_j / x_j.
std::vector<double> tangential_spread(const Expr& e, const BlockStructure& s,
                                      const std::vector<double>& x) {
  std::vector<double> out(s.block_count(), 0.0);
  for (double v : x) {
    if (!(v > 0.0)) return out;
  }
  const LogEval ev = eval_log(e, x);
  const auto a = s.weights();
  for (std::size_t b = 0; b < s.block_count(); ++b) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t j = s.block_offset(b); j < s.block_offset(b) + s.block_size(b); ++j) {
      const double d = ev.g[j] / x[j] / a[j];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    out[b] = hi - lo;
  }
  return out;
}

}  // namespace

OracleResult run_oracle(const Problem& p, std::size_t resolution, Exec exec) {
  if (resolution < 1) throw InputError("resolution must be at least 1");
  const std::size_t points = grid_size(p.structure, resolution);
  if (points > oracle_grid_limit) {
    throw InputError("grid would have " +
                     (points == std::numeric_limits<std::size_t>::max() ? std::string("too many")
                                                                        : std::to_string(points)) +
                     " points (limit " + std::to_string(oracle_grid_limit) +
                     "); use a lower --resolution");
  }
  const GridResult grid = grid_search(p.expr, p.structure, resolution, exec);
  const Trace trace = iterate(p.expr, p.initial_point, p.config);

  OracleResult r;
  r.best_point = grid.best_point;
  r.best_w = grid.best_w;
  r.resolution = resolution;
  r.points = grid.points;
  r.terminal_w = trace.terminal_w;
  r.terminal_point.assign(trace.terminal.coords().begin(), trace.terminal.coords().end());
  r.gap = r.terminal_w - r.best_w;

  // Every point of the feasible set is within l1-distance n_i / resolution of
  // a grid point in the rescaled coordinates a x of block i, and along such a
  // segment W changes by at most half the tangential gradient spread times
  // that distance. The spread is sampled at the best grid point, its one-move
  // neighbours and the terminal point, then doubled.
  const BlockStructure& s = p.structure;
  std::vector<double> spread(s.block_count(), 0.0);
  auto absorb = [&](const std::vector<double>& x) {
    const auto sp = tangential_spread(p.expr, s, x);
    for (std::size_t b = 0; b < sp.size(); ++b) spread[b] = std::max(spread[b], sp[b]);
  };
  absorb(r.best_point);
  absorb(r.terminal_point);
  for (std::size_t b = 0; b < s.block_count(); ++b) {
    const std::size_t off = s.block_offset(b);
    for (std::size_t from = off; from < off + s.block_size(b); ++from) {
      if (grid.best_counts[from] == 0) continue;
      for (std::size_t to = off; to < off + s.block_size(b); ++to) {
        if (to == from) continue;
        std::vector<std::size_t> c = grid.best_counts;
        --c[from];
        ++c[to];
        absorb(grid_point(s, resolution, c));
      }
    }
  }
  double bound = 0.0;
  for (std::size_t b = 0; b < s.block_count(); ++b) {
    bound += spread[b] * static_cast<double>(s.block_size(b)) / static_cast<double>(resolution);
  }
  // Roundoff allowance for flat objectives.
  bound += 1e-12 * (1.0 + std::abs(r.best_w));
  r.error_bound = bound;
  r.within_bound = std::isfinite(r.gap) && std::abs(r.gap) <= r.error_bound;
  return r;
}

json to_json(const OracleResult& r) {
  return {{"best_point", r.best_point},
          {"best_W", finite_or_null(r.best_w)},
          {"resolution", r.resolution},
          {"grid_points", r.points},
          {"terminal_W", finite_or_null(r.terminal_w)},
          {"terminal_point", r.terminal_point},
          {"gap", finite_or_null(r.gap)},
          {"error_bound", finite_or_null(r.error_bound)},
          {"within_bound", r.within_bound}};
}

}  // namespace kj
