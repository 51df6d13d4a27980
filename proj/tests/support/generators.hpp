#pragma once

// Random fixtures for property tests.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "kneejerk/discriminant.hpp"
#include "kneejerk/expr.hpp"
#include "kneejerk/polynomial.hpp"
#include "kneejerk/random.hpp"

namespace kj::test {

/// Positive-coefficient polynomial in n variables; total degree of each term
/// in [1, max_degree] (exactly max_degree when homogeneous).
inline SparsePolynomial random_polynomial(Rng& rng, std::size_t n, int max_degree,
                                          std::size_t max_terms, bool homogeneous = false) {
  const std::size_t count = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(max_terms)));
  std::vector<Term> terms;
  for (std::size_t t = 0; t < count; ++t) {
    Term term;
    term.coeff = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
    term.exponents.assign(n, 0);
    const int degree = homogeneous ? max_degree : static_cast<int>(rng.integer(1, max_degree));
    for (int d = 0; d < degree; ++d) {
      ++term.exponents[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(n) - 1))];
    }
    terms.push_back(std::move(term));
  }
  return SparsePolynomial(n, std::move(terms));
}

/// Random closure-class tree: sums, products, powers (fractional allowed),
/// constants and variables.
inline NodeSpec random_tree(Rng& rng, std::size_t n, int depth) {
  const double leaf_bias = depth <= 0 ? 1.0 : 0.3;
  if (rng.uniform() < leaf_bias) {
    if (rng.uniform() < 0.8) return var(static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(n) - 1)));
    return constant(std::exp(rng.uniform(-1.5, 1.5)));
  }
  const double pick = rng.uniform();
  if (pick < 0.4) {
    std::vector<NodeSpec> kids;
    const auto k = rng.integer(1, 3);
    for (std::int64_t i = 0; i < k; ++i) kids.push_back(random_tree(rng, n, depth - 1));
    return sum(std::move(kids));
  }
  if (pick < 0.75) {
    std::vector<NodeSpec> kids;
    const auto k = rng.integer(1, 3);
    for (std::int64_t i = 0; i < k; ++i) kids.push_back(random_tree(rng, n, depth - 1));
    return prod(std::move(kids));
  }
  return pow(random_tree(rng, n, depth - 1), rng.uniform(0.3, 3.0));
}

/// Expression that mentions every variable at least once (so that every
/// block has positive gradient mass at interior points).
inline Expr random_expression(Rng& rng, std::size_t n, int depth = 3) {
  std::vector<NodeSpec> parts;
  parts.push_back(random_tree(rng, n, depth));
  std::vector<NodeSpec> all;
  for (std::size_t i = 0; i < n; ++i) all.push_back(var(i));
  parts.push_back(pow(sum(std::move(all)), rng.uniform(0.5, 2.0)));
  return Expr::build(rng.uniform() < 0.5 ? prod(std::move(parts)) : sum(std::move(parts)), n);
}

/// Polynomial in which every variable appears.
inline SparsePolynomial random_full_polynomial(Rng& rng, std::size_t n, int max_degree,
                                               std::size_t max_terms, bool homogeneous = false) {
  for (;;) {
    SparsePolynomial p = random_polynomial(rng, n, max_degree, max_terms, homogeneous);
    std::vector<bool> seen(n, false);
    for (const auto& t : p.terms()) {
      for (std::size_t i = 0; i < n; ++i) seen[i] = seen[i] || t.exponents[i] > 0;
    }
    if (std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) return p;
  }
}

/// Random connected multigraph: a random spanning tree plus `extra` edges.
inline Graph random_connected_graph(Rng& rng, std::size_t vertices, std::size_t extra,
                                    bool allow_parallel = true) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t v = 1; v < vertices; ++v) {
    pairs.emplace_back(static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(v) - 1)), v);
  }
  std::size_t attempts = 0;
  while (pairs.size() < vertices - 1 + extra && attempts++ < 1000) {
    const auto u = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(vertices) - 1));
    const auto v = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(vertices) - 1));
    if (u == v) continue;
    const auto key = std::minmax(u, v);
    const bool dup = std::any_of(pairs.begin(), pairs.end(),
                                 [&](const auto& p) { return std::minmax(p.first, p.second) == key; });
    if (dup && !allow_parallel) continue;
    pairs.emplace_back(u, v);
  }
  return Graph::from_pairs(vertices, pairs);
}

}  // namespace kj::test
