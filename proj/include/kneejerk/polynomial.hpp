#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kneejerk/expr.hpp"

namespace kj {

struct Term {
  double coeff = 1.0;
  std::vector<int> exponents;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Polynomial with positive coefficients. Terms are kept in lexicographic
/// order of exponent vectors with duplicates merged, so equality is
/// structural.
class SparsePolynomial {
 public:
  SparsePolynomial(std::size_t dimension, std::vector<Term> terms);

  std::size_t dimension() const { return dimension_; }
  const std::vector<Term>& terms() const { return terms_; }

  /// Common total degree when every term has the same degree.
  std::optional<int> homogeneous_degree() const;

  /// Direct evaluation (no log domain); meant for small, moderate inputs.
  double evaluate(std::span<const double> x) const;

  /// Exact evaluation at integer points. Requires integral coefficients;
  /// throws ValidationError on overflow.
  std::int64_t evaluate_exact(std::span<const std::int64_t> x) const;

  friend bool operator==(const SparsePolynomial&, const SparsePolynomial&) = default;

 private:
  std::size_t dimension_;
  std::vector<Term> terms_;
};

/// Tree whose value equals p on the open orthant. Coefficient 1 and exponent
/// 1 are elided, single-term and single-factor nodes collapse.
Expr polynomial_to_expression(const SparsePolynomial& p);

}  // namespace kj
