#pragma once

// Feasible sets: products of weighted simplices
//   { x >= 0 : sum_j a_{i,j} x_{i,j} = 1 for every block i }
// and the I-divergence between points of such sets.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace kj {

inline constexpr double block_constraint_tolerance = 1e-12;
inline constexpr double divergence_input_tolerance = 1e-9;

/// Block sizes and per-coordinate weights. Cheap to copy (shared storage).
class BlockStructure {
 public:
  /// Empty `weights` means all ones.
  explicit BlockStructure(std::vector<std::size_t> sizes, std::vector<double> weights = {});

  static BlockStructure single(std::size_t n) { return BlockStructure({n}); }

  std::size_t dimension() const { return data_->dimension; }
  std::size_t block_count() const { return data_->sizes.size(); }
  std::size_t block_size(std::size_t b) const { return data_->sizes[b]; }
  std::size_t block_offset(std::size_t b) const { return data_->offsets[b]; }
  std::span<const std::size_t> sizes() const { return data_->sizes; }
  std::span<const double> weights() const { return data_->weights; }
  bool unit_weights() const { return data_->unit; }

  friend bool operator==(const BlockStructure& a, const BlockStructure& b) {
    return a.data_ == b.data_ ||
           (a.data_->sizes == b.data_->sizes && a.data_->weights == b.data_->weights);
  }

 private:
  struct Data {
    std::vector<std::size_t> sizes;
    std::vector<std::size_t> offsets;
    std::vector<double> weights;
    std::size_t dimension = 0;
    bool unit = true;
  };
  std::shared_ptr<const Data> data_;
};

/// A point of the closed feasible set of its structure.
class BlockPoint {
 public:
  /// Validates nonnegativity and every block constraint to
  /// block_constraint_tolerance; throws ValidationError otherwise.
  BlockPoint(BlockStructure structure, std::vector<double> x);

  const BlockStructure& structure() const { return structure_; }
  std::span<const double> coords() const { return x_; }
  std::span<const double> block(std::size_t b) const {
    return std::span<const double>(x_).subspan(structure_.block_offset(b),
                                               structure_.block_size(b));
  }
  double operator[](std::size_t i) const { return x_[i]; }
  std::size_t size() const { return x_.size(); }
  bool interior() const { return interior_; }

  friend bool operator==(const BlockPoint& a, const BlockPoint& b) {
    return a.structure_ == b.structure_ && a.x_ == b.x_;
  }

 private:
  BlockStructure structure_;
  std::vector<double> x_;
  bool interior_ = true;
};

/// Per block, equal mass a_{i,j} x_{i,j} = 1 / n_i.
BlockPoint barycenter(const BlockStructure& s);

/// Divides each block of `raw` by sum_j a_{i,j} raw_{i,j}. Throws
/// ValidationError on negative entries or an all-zero block.
BlockPoint normalize(std::span<const double> raw, const BlockStructure& s);

/// Plain I(y; x) = sum_j y_j log(y_j / x_j) with 0 log 0 = 0; +inf if some
/// y_j > 0 meets x_j = 0. Evaluated as sum_j (y_j log(y_j / x_j) - y_j + x_j),
/// which is the same number for inputs of equal total mass and keeps full
/// relative accuracy when y is close to x. Inputs are not checked for
/// normalization.
double i_divergence(std::span<const double> y, std::span<const double> x);

/// Per-block divergence of the rescaled vectors (a y) and (a x).
std::vector<double> block_divergences(std::span<const double> y, std::span<const double> x,
                                      const BlockStructure& s);

/// Sum of block_divergences. Both inputs must satisfy the block constraints
/// to divergence_input_tolerance.
double i_divergence(std::span<const double> y, std::span<const double> x,
                    const BlockStructure& s);

double i_divergence(const BlockPoint& y, const BlockPoint& x);

}  // namespace kj
