#pragma once

// JSON forms of the library types.
//
//   expression  {"op": "var", "index": i}
//               {"op": "const", "value": c}
//               {"op": "sum" | "prod", "args": [node, ...]}
//               {"op": "pow", "arg": node, "exponent": p}
//   polynomial  {"n": int, "terms": [{"c": number, "e": [int, ...]}, ...]}
//   graph       {"vertices": int, "edges": [[u, v], ...]}  (edge index = position;
//               an optional third entry overrides the variable index)
//   structure   {"blocks": [int, ...], "weights": [number, ...]}

#include <string>
#include <string_view>

#include <json.hpp>

#include "kneejerk/diagnostics.hpp"
#include "kneejerk/discriminant.hpp"
#include "kneejerk/expr.hpp"
#include "kneejerk/polynomial.hpp"
#include "kneejerk/simplex.hpp"

namespace kj {

using json = nlohmann::json;

/// Parses text, reporting syntax errors with line and column.
json parse_json_text(std::string_view text);

/// `where` is a JSON-pointer-like location used in error messages.
NodeSpec node_from_json(const json& j, const std::string& where = "/expression");
json node_to_json(const NodeSpec& n);

SparsePolynomial polynomial_from_json(const json& j, const std::string& where = "/polynomial");
json polynomial_to_json(const SparsePolynomial& p);

Graph graph_from_json(const json& j, const std::string& where = "/graph");
json graph_to_json(const Graph& g);

BlockStructure structure_from_json(const json& j, std::size_t default_dimension);
json structure_to_json(const BlockStructure& s);

json to_json(const InequalityReport& r);
json to_json(const ArgmaxReport& r);
json to_json(const ConvexityReport& r);

/// Largest variable index + 1.
std::size_t implied_dimension(const NodeSpec& n);

}  // namespace kj
