#include "kneejerk/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kneejerk/error.hpp"

namespace kj {

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw InputError("field " + where + ": " + what);
}

const json& member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema_error(where + "/" + key, "missing");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) schema_error(where, "expected a number");
  return j.get<double>();
}

std::int64_t integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) schema_error(where, "expected an integer");
  return j.get<std::int64_t>();
}

std::size_t count(const json& j, const std::string& where) {
  const std::int64_t v = integer(j, where);
  if (v < 0) schema_error(where, "must be nonnegative");
  return static_cast<std::size_t>(v);
}

const json& array(const json& j, const std::string& where) {
  if (!j.is_array()) schema_error(where, "expected an array");
  return j;
}

// JSON cannot hold inf/nan; reports use null for those.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json parse_json_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError("JSON syntax error at line " + std::to_string(line) + ", column " +
                     std::to_string(col) + ": " + e.what());
  }
}

NodeSpec node_from_json(const json& j, const std::string& where) {
  const json& op_j = member(j, "op", where);
  if (!op_j.is_string()) schema_error(where + "/op", "expected a string");
  const std::string op = op_j.get<std::string>();
  if (op == "var") return var(count(member(j, "index", where), where + "/index"));
  if (op == "const") return constant(number(member(j, "value", where), where + "/value"));
  if (op == "sum" || op == "prod") {
    const json& args = array(member(j, "args", where), where + "/args");
    std::vector<NodeSpec> kids;
    for (std::size_t i = 0; i < args.size(); ++i) {
      kids.push_back(node_from_json(args[i], where + "/args/" + std::to_string(i)));
    }
    return op == "sum" ? sum(std::move(kids)) : prod(std::move(kids));
  }
  if (op == "pow") {
    return pow(node_from_json(member(j, "arg", where), where + "/arg"),
               number(member(j, "exponent", where), where + "/exponent"));
  }
  schema_error(where + "/op", "unknown op '" + op + "'");
}

json node_to_json(const NodeSpec& n) {
  switch (n.kind) {
    case NodeKind::var: return {{"op", "var"}, {"index", n.index}};
    case NodeKind::constant: return {{"op", "const"}, {"value", n.value}};
    case NodeKind::pow:
      return {{"op", "pow"}, {"arg", node_to_json(n.children.front())}, {"exponent", n.value}};
    case NodeKind::sum:
    case NodeKind::prod: {
      json args = json::array();
      for (const auto& c : n.children) args.push_back(node_to_json(c));
      return {{"op", to_string(n.kind)}, {"args", std::move(args)}};
    }
  }
  return nullptr;
}

SparsePolynomial polynomial_from_json(const json& j, const std::string& where) {
  const std::size_t n = count(member(j, "n", where), where + "/n");
  const json& terms_j = array(member(j, "terms", where), where + "/terms");
  std::vector<Term> terms;
  for (std::size_t t = 0; t < terms_j.size(); ++t) {
    const std::string tw = where + "/terms/" + std::to_string(t);
    Term term;
    term.coeff = number(member(terms_j[t], "c", tw), tw + "/c");
    const json& e = array(member(terms_j[t], "e", tw), tw + "/e");
    for (std::size_t i = 0; i < e.size(); ++i) {
      const std::int64_t v = integer(e[i], tw + "/e/" + std::to_string(i));
      if (v < 0 || v > std::numeric_limits<int>::max()) {
        schema_error(tw + "/e/" + std::to_string(i), "exponent out of range");
      }
      term.exponents.push_back(static_cast<int>(v));
    }
    terms.push_back(std::move(term));
  }
  try {
    return SparsePolynomial(n, std::move(terms));
  } catch (const ValidationError& e) {
    throw ValidationError("field " + where + ": " + e.what());
  }
}

json polynomial_to_json(const SparsePolynomial& p) {
  json terms = json::array();
  for (const auto& t : p.terms()) terms.push_back({{"c", t.coeff}, {"e", t.exponents}});
  return {{"n", p.dimension()}, {"terms", std::move(terms)}};
}

Graph graph_from_json(const json& j, const std::string& where) {
  const std::size_t vertices = count(member(j, "vertices", where), where + "/vertices");
  const json& edges_j = array(member(j, "edges", where), where + "/edges");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < edges_j.size(); ++i) {
    const std::string ew = where + "/edges/" + std::to_string(i);
    const json& e = array(edges_j[i], ew);
    if (e.size() != 2 && e.size() != 3) schema_error(ew, "expected [u, v] or [u, v, variable]");
    Edge edge{count(e[0], ew + "/0"), count(e[1], ew + "/1"), i};
    if (e.size() == 3) edge.variable = count(e[2], ew + "/2");
    edges.push_back(edge);
  }
  try {
    return Graph(vertices, std::move(edges));
  } catch (const ValidationError& e) {
    throw ValidationError("field " + where + ": " + e.what());
  }
}

json graph_to_json(const Graph& g) {
  json edges = json::array();
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const Edge& e = g.edges()[i];
    if (e.variable == i) {
      edges.push_back({e.u, e.v});
    } else {
      edges.push_back({e.u, e.v, e.variable});
    }
  }
  return {{"vertices", g.vertex_count()}, {"edges", std::move(edges)}};
}

BlockStructure structure_from_json(const json& j, std::size_t default_dimension) {
  std::vector<std::size_t> blocks;
  if (j.contains("blocks")) {
    const json& b = array(j["blocks"], "/blocks");
    for (std::size_t i = 0; i < b.size(); ++i) blocks.push_back(count(b[i], "/blocks/" + std::to_string(i)));
  } else {
    blocks.push_back(default_dimension);
  }
  std::vector<double> weights;
  if (j.contains("weights") && !j["weights"].is_null()) {
    const json& w = array(j["weights"], "/weights");
    for (std::size_t i = 0; i < w.size(); ++i) weights.push_back(number(w[i], "/weights/" + std::to_string(i)));
  }
  try {
    return BlockStructure(std::move(blocks), std::move(weights));
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    const char* field = what.find("weights") != std::string::npos ? "/weights" : "/blocks";
    throw ValidationError("field " + std::string(field) + ": " + what);
  }
}

json structure_to_json(const BlockStructure& s) {
  json j{{"blocks", std::vector<std::size_t>(s.sizes().begin(), s.sizes().end())}};
  if (!s.unit_weights()) {
    j["weights"] = std::vector<double>(s.weights().begin(), s.weights().end());
  }
  return j;
}

json to_json(const InequalityReport& r) {
  return {{"lhs", finite_or_null(r.lhs)},
          {"rhs", finite_or_null(r.rhs)},
          {"margin", finite_or_null(r.margin)},
          {"pass", r.pass}};
}

json to_json(const ArgmaxReport& r) {
  return {{"bound_at_next", finite_or_null(r.bound_at_next)},
          {"worst_competitor_bound", finite_or_null(r.worst_competitor_bound)},
          {"worst_competitor", r.worst_competitor},
          {"margin", finite_or_null(r.margin)},
          {"pass", r.pass}};
}

json to_json(const ConvexityReport& r) {
  return {{"samples", r.samples},
          {"worst_eigenvalue", finite_or_null(r.worst_eigenvalue)},
          {"worst_point", r.worst_point},
          {"pass", r.pass}};
}

std::size_t implied_dimension(const NodeSpec& n) {
  std::size_t d = n.kind == NodeKind::var ? n.index + 1 : 0;
  for (const auto& c : n.children) d = std::max(d, implied_dimension(c));
  return d;
}

}  // namespace kj
