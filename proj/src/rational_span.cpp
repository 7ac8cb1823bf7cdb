#include "hypocone/rational_span.hpp"

#include <stdexcept>

namespace hypocone {

Rational dot(const RationalVector& a, const RationalVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
  }
  return s;
}

RationalVector RationalSpan::residual(const RationalVector& v) const {
  if (v.size() != dim_) throw std::invalid_argument("RationalSpan: dimension mismatch");
  RationalVector r = v;
  for (auto& q : r) q.canonicalize();
  for (std::size_t b = 0; b < orthogonal_.size(); ++b) {
    const Rational coef = dot(r, orthogonal_[b]) / norms_[b];
    if (coef == 0) continue;
    for (std::size_t i = 0; i < dim_; ++i) {
      if (orthogonal_[b][i] != 0) r[i] -= coef * orthogonal_[b][i];
    }
  }
  return r;
}

bool RationalSpan::contains(const RationalVector& v) const { return is_zero_vector(residual(v)); }

bool RationalSpan::insert(const RationalVector& v) {
  RationalVector r = residual(v);
  if (is_zero_vector(r)) return false;
  norms_.push_back(dot(r, r));
  orthogonal_.push_back(std::move(r));
  return true;
}

std::size_t exact_rank(const std::vector<RationalVector>& vectors, std::size_t dim) {
  RationalSpan span(dim);
  for (const auto& v : vectors) span.insert(v);
  return span.rank();
}

RationalVector primitive_direction(const RationalVector& v) {
  mpz_class lcm_den = 1;
  for (const auto& q : v) {
    if (q != 0) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), q.get_den_mpz_t());
  }
  mpz_class g = 0;
  for (const auto& q : v) {
    if (q == 0) continue;
    mpz_class n = q.get_num() * (lcm_den / q.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
  }
  if (g == 0) return v;
  RationalVector out;
  out.reserve(v.size());
  for (const auto& q : v) {
    Rational s = q * Rational(lcm_den) / Rational(g);
    s.canonicalize();
    out.push_back(s);
  }
  return out;
}

}  // namespace hypocone
