#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hypocone/vector_field.hpp"

namespace testing_support {

using hypocone::Polynomial;
using hypocone::PolyVectorField;
using hypocone::Rational;
using hypocone::RationalVector;

inline Rational small_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-5, 5), den(1, 4);
  return Rational(num(rng), den(rng));
}

/// Random polynomial with up to `terms` terms of total degree <= max_degree.
inline Polynomial random_polynomial(std::mt19937_64& rng, std::size_t dim, unsigned max_degree, int terms) {
  Polynomial p(dim);
  std::uniform_int_distribution<unsigned> pick(0, max_degree);
  std::uniform_int_distribution<std::size_t> var(0, dim - 1);
  for (int t = 0; t < terms; ++t) {
    hypocone::Exponent e(dim, 0);
    const unsigned deg = pick(rng);
    for (unsigned k = 0; k < deg; ++k) e[var(rng)] += 1;
    p.add_term(e, small_rational(rng));
  }
  return p;
}

inline PolyVectorField random_field(std::mt19937_64& rng, std::size_t dim, unsigned max_degree, int terms) {
  std::vector<Polynomial> c;
  for (std::size_t i = 0; i < dim; ++i) c.push_back(random_polynomial(rng, dim, max_degree, terms));
  return PolyVectorField(std::move(c));
}

inline RationalVector random_rational_vector(std::mt19937_64& rng, std::size_t dim) {
  RationalVector v;
  for (std::size_t i = 0; i < dim; ++i) v.push_back(small_rational(rng));
  return v;
}

inline RationalVector unit(std::size_t dim, std::size_t i) {
  RationalVector v(dim, Rational(0));
  v[i] = 1;
  return v;
}

inline Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace testing_support
