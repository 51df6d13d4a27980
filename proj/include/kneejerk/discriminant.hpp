#pragma once

// Graph discriminants D_G: the sum over spanning trees of the product of the
// tree's edge variables. Two independent routes: explicit enumeration of the
// trees, and the weighted matrix-tree determinant.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kneejerk/polynomial.hpp"

namespace kj {

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  std::size_t variable = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Connected multigraph without self-loops. Each edge carries a variable
/// index; the variables in use must be exactly 0..variable_count()-1.
class Graph {
 public:
  Graph(std::size_t vertices, std::vector<Edge> edges);

  /// Edge i gets variable i.
  static Graph from_pairs(std::size_t vertices,
                          const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

  std::size_t vertex_count() const { return vertices_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t variable_count() const { return variables_; }
  const std::vector<Edge>& edges() const { return edges_; }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::size_t vertices_;
  std::vector<Edge> edges_;
  std::size_t variables_ = 0;
};

inline constexpr std::size_t enumeration_edge_limit = 24;

/// Every spanning tree as a sorted list of edge indices; trees are listed in
/// lexicographic order. Throws ValidationError above the edge limit.
std::vector<std::vector<std::size_t>> enumerate_spanning_trees(const Graph& g);

/// Homogeneous of degree V-1 in variable_count() variables.
SparsePolynomial discriminant_polynomial(const Graph& g);

/// Weighted Kirchhoff cofactor in floating point (LU with partial pivoting).
/// `w` is indexed by variable; all entries must be positive.
double eval_matrix_tree(const Graph& g, std::span<const double> w);

/// log D_G(w) via a log-determinant; safe for large graphs.
double log_matrix_tree(const Graph& g, std::span<const double> w);

/// Exact cofactor for positive integer weights (fraction-free elimination).
/// Throws ValidationError on overflow.
std::int64_t count_matrix_tree(const Graph& g, std::span<const std::int64_t> w);

/// Fixture graphs.
Graph path_graph(std::size_t vertices);
Graph cycle_graph(std::size_t vertices);
Graph complete_graph(std::size_t vertices);

}  // namespace kj
