#include "kneejerk/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kneejerk/error.hpp"

namespace kj {

SparsePolynomial::SparsePolynomial(std::size_t dimension, std::vector<Term> terms)
    : dimension_(dimension) {
  if (dimension == 0) throw ValidationError("polynomial dimension must be at least 1");
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const Term& term = terms[t];
    if (!(term.coeff > 0.0) || !std::isfinite(term.coeff)) {
      std::ostringstream os;
      os << "term " << t << ": coefficient must be positive and finite, got " << term.coeff;
      throw ValidationError(os.str());
    }
    if (term.exponents.size() != dimension) {
      throw ValidationError("term " + std::to_string(t) + ": exponent vector has length " +
                            std::to_string(term.exponents.size()) + ", expected " +
                            std::to_string(dimension));
    }
    for (int e : term.exponents) {
      if (e < 0) throw ValidationError("term " + std::to_string(t) + ": negative exponent");
    }
  }
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.exponents < b.exponents; });
  for (auto& term : terms) {
    if (!terms_.empty() && terms_.back().exponents == term.exponents) {
      terms_.back().coeff += term.coeff;
    } else {
      terms_.push_back(std::move(term));
    }
  }
}

std::optional<int> SparsePolynomial::homogeneous_degree() const {
  if (terms_.empty()) return std::nullopt;
  auto degree = [](const Term& t) {
    int d = 0;
    for (int e : t.exponents) d += e;
    return d;
  };
  const int d = degree(terms_.front());
  for (const auto& t : terms_) {
    if (degree(t) != d) return std::nullopt;
  }
  return d;
}

double SparsePolynomial::evaluate(std::span<const double> x) const {
  if (x.size() != dimension_) throw ValidationError("point dimension mismatch");
  double total = 0.0;
  for (const auto& t : terms_) {
    double v = t.coeff;
    for (std::size_t i = 0; i < dimension_; ++i) {
      for (int k = 0; k < t.exponents[i]; ++k) v *= x[i];
    }
    total += v;
  }
  return total;
}

std::int64_t SparsePolynomial::evaluate_exact(std::span<const std::int64_t> x) const {
  if (x.size() != dimension_) throw ValidationError("point dimension mismatch");
  __int128 total = 0;
  constexpr __int128 limit = static_cast<__int128>(1) << 62;
  for (const auto& t : terms_) {
    if (t.coeff != std::floor(t.coeff) || t.coeff > 9.0e15) {
      throw ValidationError("exact evaluation requires integral coefficients");
    }
    __int128 v = static_cast<__int128>(t.coeff);
    for (std::size_t i = 0; i < dimension_; ++i) {
      for (int k = 0; k < t.exponents[i]; ++k) {
        v *= x[i];
        if (v > limit || v < -limit) throw ValidationError("exact evaluation overflow");
      }
    }
    total += v;
    if (total > limit || total < -limit) throw ValidationError("exact evaluation overflow");
  }
  return static_cast<std::int64_t>(total);
}

Expr polynomial_to_expression(const SparsePolynomial& p) {
  if (p.terms().empty()) throw ValidationError("cannot convert an empty polynomial");
  std::vector<NodeSpec> summands;
  for (const auto& t : p.terms()) {
    std::vector<NodeSpec> factors;
    if (t.coeff != 1.0) factors.push_back(constant(t.coeff));
    for (std::size_t i = 0; i < p.dimension(); ++i) {
      if (t.exponents[i] == 1) {
        factors.push_back(var(i));
      } else if (t.exponents[i] > 1) {
        factors.push_back(pow(var(i), t.exponents[i]));
      }
    }
    if (factors.empty()) {
      summands.push_back(constant(1.0));
    } else if (factors.size() == 1) {
      summands.push_back(std::move(factors.front()));
    } else {
      summands.push_back(prod(std::move(factors)));
    }
  }
  NodeSpec root = summands.size() == 1 ? std::move(summands.front()) : sum(std::move(summands));
  return Expr::build(std::move(root), p.dimension());
}

}  // namespace kj
