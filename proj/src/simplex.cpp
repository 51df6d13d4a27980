#include "kneejerk/simplex.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "kneejerk/error.hpp"

namespace kj {

BlockStructure::BlockStructure(std::vector<std::size_t> sizes, std::vector<double> weights) {
  if (sizes.empty()) throw ValidationError("block structure needs at least one block");
  auto d = std::make_shared<Data>();
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    if (sizes[b] == 0) throw ValidationError("block " + std::to_string(b) + " has size 0");
    d->offsets.push_back(d->dimension);
    d->dimension += sizes[b];
  }
  if (weights.empty()) {
    weights.assign(d->dimension, 1.0);
  } else if (weights.size() != d->dimension) {
    throw ValidationError("weights has length " + std::to_string(weights.size()) +
                          ", expected " + std::to_string(d->dimension));
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      std::ostringstream os;
      os << "weights[" << i << "] = " << weights[i] << " must be positive and finite";
      throw ValidationError(os.str());
    }
    if (weights[i] != 1.0) d->unit = false;
  }
  d->sizes = std::move(sizes);
  d->weights = std::move(weights);
  data_ = std::move(d);
}

BlockPoint::BlockPoint(BlockStructure structure, std::vector<double> x)
    : structure_(std::move(structure)), x_(std::move(x)) {
  if (x_.size() != structure_.dimension()) {
    throw ValidationError("point has " + std::to_string(x_.size()) + " coordinates, structure has " +
                          std::to_string(structure_.dimension()));
  }
  const auto a = structure_.weights();
  for (std::size_t b = 0; b < structure_.block_count(); ++b) {
    const std::size_t off = structure_.block_offset(b);
    double mass = 0.0;
    for (std::size_t j = off; j < off + structure_.block_size(b); ++j) {
      if (!(x_[j] >= 0.0) || !std::isfinite(x_[j])) {
        std::ostringstream os;
        os << "coordinate " << j << " = " << x_[j] << " is not a nonnegative number";
        throw ValidationError(os.str());
      }
      if (x_[j] == 0.0) interior_ = false;
      mass += a[j] * x_[j];
    }
    if (std::abs(mass - 1.0) > block_constraint_tolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "block " << b << " has weighted mass " << mass << ", expected 1";
      throw ValidationError(os.str());
    }
  }
}

BlockPoint barycenter(const BlockStructure& s) {
  std::vector<double> x(s.dimension());
  const auto a = s.weights();
  for (std::size_t b = 0; b < s.block_count(); ++b) {
    const double share = 1.0 / static_cast<double>(s.block_size(b));
    for (std::size_t j = s.block_offset(b); j < s.block_offset(b) + s.block_size(b); ++j) {
      x[j] = share / a[j];
    }
  }
  return BlockPoint(s, std::move(x));
}

BlockPoint normalize(std::span<const double> raw, const BlockStructure& s) {
  if (raw.size() != s.dimension()) {
    throw ValidationError("vector has " + std::to_string(raw.size()) + " entries, structure has " +
                          std::to_string(s.dimension()));
  }
  std::vector<double> x(raw.begin(), raw.end());
  const auto a = s.weights();
  for (std::size_t b = 0; b < s.block_count(); ++b) {
    const std::size_t off = s.block_offset(b);
    const std::size_t end = off + s.block_size(b);
    double mass = 0.0;
    for (std::size_t j = off; j < end; ++j) {
      if (!(x[j] >= 0.0) || !std::isfinite(x[j])) {
        throw ValidationError("entry " + std::to_string(j) + " is negative or not finite");
      }
      mass += a[j] * x[j];
    }
    if (!(mass > 0.0)) throw ValidationError("block " + std::to_string(b) + " is all zero");
    for (std::size_t j = off; j < end; ++j) x[j] /= mass;
  }
  return BlockPoint(s, std::move(x));
}

namespace {

// x * phi((y - x) / x) with phi(t) = (1 + t) log(1 + t) - t, i.e. the term
// y log(y / x) - y + x. Summed over a normalized pair the linear parts cancel,
// and each term stays nonnegative and accurate when y is close to x.
double divergence_term(double y, double x) {
  if (y == 0.0) return x;
  if (x == 0.0) return std::numeric_limits<double>::infinity();
  const double t = (y - x) / x;
  double phi;
  if (std::abs(t) < 1e-2) {
    // sum_{k>=2} (-1)^k t^k / (k (k - 1))
    phi = 0.0;
    double power = t * t;
    for (int k = 2; k < 12; ++k) {
      phi += (k % 2 == 0 ? power : -power) / (k * (k - 1));
      power *= t;
    }
  } else {
    phi = (1.0 + t) * std::log1p(t) - t;
  }
  return x * phi;
}

}  // namespace

double i_divergence(std::span<const double> y, std::span<const double> x) {
  if (y.size() != x.size()) throw ValidationError("divergence arguments differ in length");
  double total = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (y[j] > 0.0 && x[j] == 0.0) return std::numeric_limits<double>::infinity();
    total += divergence_term(y[j], x[j]);
  }
  return total;
}

std::vector<double> block_divergences(std::span<const double> y, std::span<const double> x,
                                      const BlockStructure& s) {
  if (y.size() != s.dimension() || x.size() != s.dimension()) {
    throw ValidationError("divergence arguments do not match the block structure");
  }
  const auto a = s.weights();
  std::vector<double> out(s.block_count(), 0.0);
  for (std::size_t b = 0; b < s.block_count(); ++b) {
    double total = 0.0;
    for (std::size_t j = s.block_offset(b); j < s.block_offset(b) + s.block_size(b); ++j) {
      if (y[j] > 0.0 && x[j] == 0.0) {
        total = std::numeric_limits<double>::infinity();
        break;
      }
      total += a[j] * divergence_term(y[j], x[j]);
    }
    out[b] = total;
  }
  return out;
}

namespace {

void check_normalized(std::span<const double> v, const BlockStructure& s, const char* name) {
  const auto a = s.weights();
  for (std::size_t b = 0; b < s.block_count(); ++b) {
    double mass = 0.0;
    for (std::size_t j = s.block_offset(b); j < s.block_offset(b) + s.block_size(b); ++j) {
      if (!(v[j] >= 0.0)) {
        throw ValidationError(std::string(name) + " has a negative entry at " + std::to_string(j));
      }
      mass += a[j] * v[j];
    }
    if (std::abs(mass - 1.0) > divergence_input_tolerance) {
      throw ValidationError(std::string(name) + " is not normalized in block " +
                            std::to_string(b));
    }
  }
}

}  // namespace

double i_divergence(std::span<const double> y, std::span<const double> x,
                    const BlockStructure& s) {
  if (y.size() != s.dimension() || x.size() != s.dimension()) {
    throw ValidationError("divergence arguments do not match the block structure");
  }
  check_normalized(y, s, "y");
  check_normalized(x, s, "x");
  double total = 0.0;
  for (double d : block_divergences(y, x, s)) total += d;
  return total;
}

double i_divergence(const BlockPoint& y, const BlockPoint& x) {
  if (!(y.structure() == x.structure())) {
    throw ValidationError("divergence arguments have different block structures");
  }
  return i_divergence(y.coords(), x.coords(), x.structure());
}

}  // namespace kj
