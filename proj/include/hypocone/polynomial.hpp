#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hypocone/rational.hpp"

namespace hypocone {

using Exponent = std::vector<std::uint32_t>;

/// Graded lexicographic order: total degree first, then lexicographic with
/// x_1 > x_2 > ... Equal polynomials therefore have identical term maps.
struct GrlexLess {
  bool operator()(const Exponent& a, const Exponent& b) const;
};

std::uint32_t total_degree(const Exponent& e);

/// Degree of a polynomial. The zero polynomial has no degree; callers must
/// branch on kind before reading value.
struct Degree {
  enum class Kind { kZeroPolynomial, kFinite };
  Kind kind = Kind::kZeroPolynomial;
  std::uint32_t value = 0;

  static Degree zero_polynomial() { return {}; }
  static Degree finite(std::uint32_t n) { return {Kind::kFinite, n}; }
  bool is_zero_polynomial() const { return kind == Kind::kZeroPolynomial; }
  friend bool operator==(const Degree&, const Degree&) = default;
};

/// Sparse multivariate polynomial with exact rational coefficients.
class Polynomial {
 public:
  using TermMap = std::map<Exponent, Rational, GrlexLess>;

  explicit Polynomial(std::size_t dim);

  static Polynomial constant(std::size_t dim, const Rational& c);
  /// The coordinate function x_index.
  static Polynomial variable(std::size_t dim, std::size_t index);
  static Polynomial monomial(const Rational& c, Exponent exps);

  std::size_t dim() const { return dim_; }
  const TermMap& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Coefficient of the all-zero exponent.
  Rational constant_term() const;
  Degree degree() const;

  /// Adds c * x^exps, merging with an existing term and erasing zeros.
  void add_term(const Exponent& exps, const Rational& c);

  Polynomial derivative(std::size_t var) const;

  /// Exact substitution x := x_values; the result is then cast to double.
  double eval(std::span<const double> x) const;
  Rational eval_exact(std::span<const Rational> x) const;

  /// Coefficients (index = power of lambda) of lambda -> p(lambda * v).
  /// Trailing zeros are trimmed; an empty result means the zero polynomial.
  RationalVector restrict_to_line(std::span<const Rational> v) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(const Rational& c);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
  friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial operator-() const;

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.dim_ == b.dim_ && a.terms_ == b.terms_;
  }

  /// Human-readable form using x1..xd, e.g. "2*x1^2 - 1/3*x2".
  std::string to_string() const;

 private:
  void check_same_dim(const Polynomial& other) const;

  std::size_t dim_;
  TermMap terms_;
};

}  // namespace hypocone
