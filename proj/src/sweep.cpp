#include "kneejerk/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "kneejerk/error.hpp"
#include "kneejerk/mapping.hpp"
#include "kneejerk/random.hpp"

namespace kj {

bool VerifySummary::pass() const {
  if (!inequality_pass || !argmax_pass || !convexity.pass) return false;
  if (concavity && !concavity->pass) return false;
  if (negative_control && !negative_control->pass) return false;
  return true;
}

namespace {

std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

struct SampleResult {
  std::vector<double> x;
  InequalityReport inequality;
  ArgmaxReport argmax;
  Spectrum curvature_u;
  Spectrum curvature_x;
};

SampleResult run_sample(const Expr& e, const BlockStructure& s, const VerifyOptions& opt,
                        std::size_t k) {
  Rng rng(opt.seed, k);
  const BlockPoint x = random_interior_point(rng, s);
  SampleResult r;
  r.x.assign(x.coords().begin(), x.coords().end());
  r.inequality = verify_step_inequality(e, x);
  r.argmax = verify_argmax_property(e, x, opt.argmax_competitors, mix(opt.seed ^ mix(k)));
  r.curvature_u = spectrum(hessian_log_u(e, x.coords()));
  if (opt.concavity) r.curvature_x = spectrum(hessian_log_x(as_log_function(e), x.coords()));
  return r;
}

// Folds per-sample curvature into a report; `convex` selects the probe.
void fold_curvature(ConvexityReport& rep, double& worst_scaled, const Spectrum& sp,
                    const std::vector<double>& x, bool convex) {
  const bool ok = convex ? convex_enough(sp) : concave_enough(sp);
  if (!ok) rep.pass = false;
  const double scaled = (convex ? sp.min : -sp.max) / (1.0 + sp.norm);
  if (scaled < worst_scaled) {
    worst_scaled = scaled;
    rep.worst_eigenvalue = convex ? sp.min : sp.max;
    rep.worst_point = x;
  }
}

}  // namespace

VerifySummary verify_sweep(const Expr& e, const BlockStructure& s, const VerifyOptions& opt,
                           Exec exec) {
  if (opt.samples < 1) throw ValidationError("verify needs at least one sample");
  if (e.dimension() != s.dimension()) {
    throw ValidationError("expression and block structure disagree on dimension");
  }
  const std::size_t n = opt.samples;
  std::vector<SampleResult> results(n);

  if (exec == Exec::parallel) {
    // Exceptions may not cross the parallel region; capture the first one.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) {
      try {
        results[k] = run_sample(e, s, opt, static_cast<std::size_t>(k));
      } catch (...) {
#pragma omp critical(kj_verify_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (std::size_t k = 0; k < n; ++k) results[k] = run_sample(e, s, opt, k);
  }

  VerifySummary out;
  out.samples = n;
  out.seed = opt.seed;
  out.min_rhs = std::numeric_limits<double>::infinity();
  out.worst_inequality.margin = std::numeric_limits<double>::infinity();
  out.worst_argmax.margin = std::numeric_limits<double>::infinity();
  out.convexity.samples = n;
  out.convexity.pass = true;
  double worst_u = std::numeric_limits<double>::infinity();
  double worst_x = std::numeric_limits<double>::infinity();
  if (opt.concavity) out.concavity = ConvexityReport{n, 0.0, {}, true};

  for (std::size_t k = 0; k < n; ++k) {
    const SampleResult& r = results[k];
    if (!r.inequality.pass || r.inequality.rhs < -bound_slack) out.inequality_pass = false;
    if (r.inequality.margin < out.worst_inequality.margin) {
      out.worst_inequality = r.inequality;
      out.worst_inequality_point = r.x;
    }
    if (r.inequality.rhs < out.min_rhs) out.min_rhs = r.inequality.rhs;

    if (!r.argmax.pass) out.argmax_pass = false;
    if (r.argmax.margin < out.worst_argmax.margin) {
      out.worst_argmax = r.argmax;
      out.worst_argmax_point = r.x;
    }

    fold_curvature(out.convexity, worst_u, r.curvature_u, r.x, true);
    if (opt.concavity) fold_curvature(*out.concavity, worst_x, r.curvature_x, r.x, false);
  }

  if (opt.inject_negative) {
    out.negative_control =
        check_log_log_convexity(testing::harmonic_mean_fixture(), n, default_u_box, opt.seed);
  }
  return out;
}

namespace {

// C(n, k) saturating at SIZE_MAX.
std::size_t choose(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::size_t>::max()) return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(r);
}

std::size_t compositions(std::size_t parts, std::size_t total) {
  return choose(total + parts - 1, parts - 1);
}

// Compositions of `total` into the parts [first, first + parts), visited in
// lexicographic order starting from (0, ..., 0, total).
void unrank_composition(std::size_t index, std::size_t total, std::size_t* k, std::size_t parts) {
  std::size_t left = total;
  for (std::size_t j = 0; j + 1 < parts; ++j) {
    std::size_t t = 0;
    for (;; ++t) {
      const std::size_t c = compositions(parts - j - 1, left - t);
      if (index < c) break;
      index -= c;
    }
    k[j] = t;
    left -= t;
  }
  k[parts - 1] = left;
}

bool next_composition(std::size_t* k, std::size_t parts) {
  std::size_t p = parts - 1;
  while (p > 0 && k[p] == 0) --p;
  if (p == 0) return false;
  const std::size_t tail = k[p];
  k[p] = 0;
  ++k[p - 1];
  k[parts - 1] = tail - 1;
  return true;
}

struct GridCursor {
  const BlockStructure& s;
  std::size_t resolution;
  std::vector<std::size_t> counts;

  void seek(std::size_t index) {
    for (std::size_t b = s.block_count(); b-- > 0;) {
      const std::size_t radix = compositions(s.block_size(b), resolution);
      unrank_composition(index % radix, resolution, counts.data() + s.block_offset(b),
                         s.block_size(b));
      index /= radix;
    }
  }

  void advance() {
    for (std::size_t b = s.block_count(); b-- > 0;) {
      std::size_t* k = counts.data() + s.block_offset(b);
      if (next_composition(k, s.block_size(b))) return;
      unrank_composition(0, resolution, k, s.block_size(b));
    }
  }
};

struct ChunkBest {
  double w = -std::numeric_limits<double>::infinity();
  std::size_t index = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> counts;
};

ChunkBest scan_chunk(const Expr& e, const BlockStructure& s, std::size_t resolution,
                     std::size_t begin, std::size_t end) {
  ChunkBest best;
  if (begin >= end) return best;
  GridCursor cur{s, resolution, std::vector<std::size_t>(s.dimension())};
  cur.seek(begin);
  std::vector<double> x;
  for (std::size_t idx = begin; idx < end; ++idx) {
    x = grid_point(s, resolution, cur.counts);
    const double w = eval_log_closed(e, x).w;
    if (w > best.w || best.index == std::numeric_limits<std::size_t>::max()) {
      best.w = w;
      best.index = idx;
      best.counts = cur.counts;
    }
    if (idx + 1 < end) cur.advance();
  }
  return best;
}

}  // namespace

std::size_t grid_size(const BlockStructure& s, std::size_t resolution) {
  unsigned __int128 total = 1;
  for (std::size_t b = 0; b < s.block_count(); ++b) {
    total *= compositions(s.block_size(b), resolution);
    if (total > std::numeric_limits<std::size_t>::max()) {
      return std::numeric_limits<std::size_t>::max();
    }
  }
  return static_cast<std::size_t>(total);
}

std::vector<double> grid_point(const BlockStructure& s, std::size_t resolution,
                               const std::vector<std::size_t>& counts) {
  const auto a = s.weights();
  std::vector<double> x(s.dimension());
  for (std::size_t j = 0; j < x.size(); ++j) {
    x[j] = static_cast<double>(counts[j]) / static_cast<double>(resolution) / a[j];
  }
  return x;
}

GridResult grid_search(const Expr& e, const BlockStructure& s, std::size_t resolution,
                       Exec exec) {
  if (resolution < 1) throw ValidationError("grid resolution must be at least 1");
  if (e.dimension() != s.dimension()) {
    throw ValidationError("expression and block structure disagree on dimension");
  }
  const std::size_t total = grid_size(s, resolution);
  if (total == std::numeric_limits<std::size_t>::max()) {
    throw ValidationError("grid is too large to index");
  }

  ChunkBest best;
  if (exec == Exec::parallel) {
    const std::size_t chunk = 4096;
    const std::size_t chunks = (total + chunk - 1) / chunk;
    std::vector<ChunkBest> partial(chunks);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
      try {
        const std::size_t begin = static_cast<std::size_t>(c) * chunk;
        partial[c] = scan_chunk(e, s, resolution, begin, std::min(total, begin + chunk));
      } catch (...) {
#pragma omp critical(kj_grid_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    // Chunks are in index order, so strict '>' keeps the smallest index on ties.
    for (auto& p : partial) {
      if (p.w > best.w || best.index == std::numeric_limits<std::size_t>::max()) {
        best = std::move(p);
      }
    }
  } else {
    best = scan_chunk(e, s, resolution, 0, total);
  }

  GridResult r;
  r.best_counts = best.counts;
  r.best_point = grid_point(s, resolution, best.counts);
  r.best_w = best.w;
  r.best_index = best.index;
  r.points = total;
  return r;
}

}  // namespace kj
