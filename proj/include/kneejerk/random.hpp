#pragma once

// Seeded randomness. Every draw derives from (seed, stream) so sweeps can hand
// each sample its own generator and stay independent of thread scheduling.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "kneejerk/simplex.hpp"

namespace kj {

class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32), 0x6b6e6565u};
    engine_.seed(seq);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(engine_() % span);
  }

  /// Standard exponential variate, strictly positive.
  double exponential() { return -std::log1p(-uniform()) + 0x1.0p-60; }

 private:
  std::mt19937_64 engine_;
};

/// Flat-Dirichlet point of the product of weighted simplices; always interior.
inline BlockPoint random_interior_point(Rng& rng, const BlockStructure& s) {
  std::vector<double> raw(s.dimension());
  for (auto& v : raw) v = rng.exponential();
  const auto a = s.weights();
  for (std::size_t j = 0; j < raw.size(); ++j) raw[j] /= a[j];
  return normalize(raw, s);
}

}  // namespace kj
