#include "kneejerk/discriminant.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "kneejerk/error.hpp"

namespace kj {

namespace {

// Union-find with an undo log, for backtracking.
class RollbackDsu {
 public:
  explicit RollbackDsu(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  std::size_t find(std::size_t v) const {
    while (parent_[v] != v) v = parent_[v];
    return v;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    history_.push_back({b, rank_[a] == rank_[b] ? a : npos});
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

  void undo() {
    const auto [child, bumped] = history_.back();
    history_.pop_back();
    if (bumped != npos) --rank_[bumped];
    parent_[child] = child;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> rank_;
  std::vector<std::pair<std::size_t, std::size_t>> history_;
};

bool connected(std::size_t vertices, const std::vector<Edge>& edges) {
  RollbackDsu dsu(vertices);
  std::size_t components = vertices;
  for (const auto& e : edges) {
    if (dsu.unite(e.u, e.v)) --components;
  }
  return components == 1;
}

}  // namespace

Graph::Graph(std::size_t vertices, std::vector<Edge> edges)
    : vertices_(vertices), edges_(std::move(edges)) {
  if (vertices_ < 2) throw ValidationError("graph needs at least 2 vertices");
  std::vector<bool> used;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.u >= vertices_ || e.v >= vertices_) {
      throw ValidationError("edge " + std::to_string(i) + " has an endpoint out of range");
    }
    if (e.u == e.v) throw ValidationError("edge " + std::to_string(i) + " is a self-loop");
    if (e.variable >= used.size()) used.resize(e.variable + 1, false);
    used[e.variable] = true;
  }
  variables_ = used.size();
  for (std::size_t k = 0; k < used.size(); ++k) {
    if (!used[k]) {
      throw ValidationError("edge variable " + std::to_string(k) + " is not used by any edge");
    }
  }
  if (!connected(vertices_, edges_)) throw ValidationError("graph is not connected");
}

Graph Graph::from_pairs(std::size_t vertices,
                        const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    edges.push_back({pairs[i].first, pairs[i].second, i});
  }
  return Graph(vertices, std::move(edges));
}

std::vector<std::vector<std::size_t>> enumerate_spanning_trees(const Graph& g) {
  const std::size_t E = g.edge_count();
  if (E > enumeration_edge_limit) {
    throw ValidationError("graph has " + std::to_string(E) + " edges; enumeration is limited to " +
                          std::to_string(enumeration_edge_limit) +
                          ", use eval_matrix_tree instead");
  }
  const std::size_t V = g.vertex_count();
  const auto& edges = g.edges();
  std::vector<std::vector<std::size_t>> trees;
  std::vector<std::size_t> chosen;
  RollbackDsu dsu(V);

  // Connectivity pruning: chosen edges plus every edge from `from` on must
  // still span the graph.
  auto can_span = [&](std::size_t from) {
    RollbackDsu probe(V);
    std::size_t comps = V;
    for (std::size_t e : chosen) {
      if (probe.unite(edges[e].u, edges[e].v)) --comps;
    }
    for (std::size_t e = from; e < E && comps > 1; ++e) {
      if (probe.unite(edges[e].u, edges[e].v)) --comps;
    }
    return comps == 1;
  };

  auto recurse = [&](auto&& self, std::size_t next) -> void {
    if (chosen.size() == V - 1) {
      trees.push_back(chosen);
      return;
    }
    if (E - next < (V - 1) - chosen.size()) return;
    const Edge& e = edges[next];
    if (dsu.unite(e.u, e.v)) {
      chosen.push_back(next);
      self(self, next + 1);
      chosen.pop_back();
      dsu.undo();
    }
    if (can_span(next + 1)) self(self, next + 1);
  };
  recurse(recurse, 0);
  return trees;
}

SparsePolynomial discriminant_polynomial(const Graph& g) {
  std::vector<Term> terms;
  for (const auto& tree : enumerate_spanning_trees(g)) {
    Term t;
    t.exponents.assign(g.variable_count(), 0);
    for (std::size_t e : tree) ++t.exponents[g.edges()[e].variable];
    terms.push_back(std::move(t));
  }
  return SparsePolynomial(g.variable_count(), std::move(terms));
}

namespace {

template <typename T>
void check_weights(const Graph& g, std::span<const T> w) {
  if (w.size() != g.variable_count()) {
    throw ValidationError("expected " + std::to_string(g.variable_count()) + " weights, got " +
                          std::to_string(w.size()));
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0)) {
      throw ValidationError("weight " + std::to_string(i) + " must be positive");
    }
  }
}

// Laplacian with the last row and column removed.
Eigen::MatrixXd reduced_laplacian(const Graph& g, std::span<const double> w) {
  const std::size_t m = g.vertex_count() - 1;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
  for (const auto& e : g.edges()) {
    const double we = w[e.variable];
    if (e.u < m) L(e.u, e.u) += we;
    if (e.v < m) L(e.v, e.v) += we;
    if (e.u < m && e.v < m) {
      L(e.u, e.v) -= we;
      L(e.v, e.u) -= we;
    }
  }
  return L;
}

}  // namespace

double eval_matrix_tree(const Graph& g, std::span<const double> w) {
  check_weights(g, w);
  return reduced_laplacian(g, w).partialPivLu().determinant();
}

double log_matrix_tree(const Graph& g, std::span<const double> w) {
  check_weights(g, w);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(reduced_laplacian(g, w));
  const auto& U = lu.matrixLU();
  double log_det = 0.0;
  int sign = lu.permutationP().determinant();
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    const double d = U(i, i);
    if (d < 0) sign = -sign;
    log_det += std::log(std::abs(d));
  }
  if (sign < 0) throw EvaluationError("reduced Laplacian has negative determinant");
  return log_det;
}

std::int64_t count_matrix_tree(const Graph& g, std::span<const std::int64_t> w) {
  check_weights(g, w);
  const std::size_t m = g.vertex_count() - 1;
  std::vector<std::vector<__int128>> a(m, std::vector<__int128>(m, 0));
  for (const auto& e : g.edges()) {
    const __int128 we = w[e.variable];
    if (e.u < m) a[e.u][e.u] += we;
    if (e.v < m) a[e.v][e.v] += we;
    if (e.u < m && e.v < m) {
      a[e.u][e.v] -= we;
      a[e.v][e.u] -= we;
    }
  }
  constexpr __int128 limit = static_cast<__int128>(1) << 100;
  // Bareiss: every division below is exact.
  __int128 prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k < m; ++k) {
    if (a[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < m && a[p][k] == 0) ++p;
      if (p == m) return 0;
      std::swap(a[k], a[p]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < m; ++i) {
      for (std::size_t j = k + 1; j < m; ++j) {
        const __int128 v = a[i][j] * a[k][k] - a[i][k] * a[k][j];
        if (v > limit || v < -limit) throw ValidationError("exact matrix-tree overflow");
        a[i][j] = v / prev;
      }
    }
    prev = a[k][k];
  }
  const __int128 det = sign * (m == 0 ? 1 : a[m - 1][m - 1]);
  if (det > static_cast<__int128>(INT64_MAX)) throw ValidationError("exact matrix-tree overflow");
  return static_cast<std::int64_t>(det);
}

Graph path_graph(std::size_t vertices) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t v = 0; v + 1 < vertices; ++v) pairs.emplace_back(v, v + 1);
  return Graph::from_pairs(vertices, pairs);
}

Graph cycle_graph(std::size_t vertices) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t v = 0; v < vertices; ++v) pairs.emplace_back(v, (v + 1) % vertices);
  return Graph::from_pairs(vertices, pairs);
}

Graph complete_graph(std::size_t vertices) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t u = 0; u < vertices; ++u) {
    for (std::size_t v = u + 1; v < vertices; ++v) pairs.emplace_back(u, v);
  }
  return Graph::from_pairs(vertices, pairs);
}

}  // namespace kj
