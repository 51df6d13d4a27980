#pragma once

// Independent reference computations. Nothing here calls into the code paths
// it is used to check.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "kneejerk/discriminant.hpp"

namespace kj::test {

using Real50 = boost::multiprecision::cpp_bin_float_50;

/// Bisection on a sign change of f over [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Root in (0, 1) of 394 x^2 - 246 x - 34, i.e. the stationary point of
/// 34 ln x + 38 ln(1 - x) + 125 ln(1 + 2x), found by bisection on the
/// derivative.
inline double dlr_root() {
  return bisect([](double x) { return 34.0 / x - 38.0 / (1.0 - x) + 250.0 / (1.0 + 2.0 * x); },
                1e-9, 1.0 - 1e-9);
}

inline Real50 dlr_log_value(const Real50& x, const Real50& y) {
  using boost::multiprecision::log;
  return 34 * log(x) + 38 * log(y) + 125 * log(1 + 2 * x);
}

/// Central finite-difference gradient of f in u = log x.
inline std::vector<double> fd_gradient_u(const std::function<double(const std::vector<double>&)>& w,
                                         const std::vector<double>& u, double h) {
  std::vector<double> g(u.size());
  std::vector<double> p = u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    p[i] = u[i] + h;
    const double up = w(p);
    p[i] = u[i] - h;
    const double down = w(p);
    p[i] = u[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// Spanning trees by brute force over every (V-1)-subset of edges.
inline std::size_t brute_force_tree_count(const Graph& g) {
  const std::size_t V = g.vertex_count();
  const std::size_t E = g.edge_count();
  std::size_t count = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << E); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) != V - 1) continue;
    std::vector<std::size_t> parent(V);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t v) {
      return parent[v] == v ? v : parent[v] = find(parent[v]);
    };
    bool acyclic = true;
    for (std::size_t e = 0; e < E && acyclic; ++e) {
      if (!(mask >> e & 1)) continue;
      const auto a = find(g.edges()[e].u);
      const auto b = find(g.edges()[e].v);
      if (a == b) acyclic = false;
      parent[a] = b;
    }
    if (acyclic) ++count;
  }
  return count;
}

}  // namespace kj::test
