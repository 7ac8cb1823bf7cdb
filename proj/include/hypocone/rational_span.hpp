#pragma once

#include <vector>

#include "hypocone/rational.hpp"

namespace hypocone {

/// Exact incremental span of rational vectors. Keeps a rational orthogonal
/// (not normalized) basis so projections stay exact.
class RationalSpan {
 public:
  explicit RationalSpan(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t rank() const { return orthogonal_.size(); }

  /// Component of v orthogonal to the span.
  RationalVector residual(const RationalVector& v) const;
  bool contains(const RationalVector& v) const;
  /// Adds v; returns false (and leaves the span unchanged) if v is already in it.
  bool insert(const RationalVector& v);

 private:
  std::size_t dim_;
  std::vector<RationalVector> orthogonal_;
  std::vector<Rational> norms_;
};

Rational dot(const RationalVector& a, const RationalVector& b);

/// Exact rank of a set of vectors.
std::size_t exact_rank(const std::vector<RationalVector>& vectors, std::size_t dim);

/// Positive rescaling to a primitive integer vector (gcd 1). Zero stays zero.
RationalVector primitive_direction(const RationalVector& v);

}  // namespace hypocone
