#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hypocone/polynomial.hpp"

namespace hypocone {

/// Polynomial vector field sum_j V^j(x) d/dx_j on R^dim.
class PolyVectorField {
 public:
  explicit PolyVectorField(std::vector<Polynomial> components);
  static PolyVectorField zero(std::size_t dim);
  static PolyVectorField constant(const RationalVector& value);

  std::size_t dim() const { return components_.size(); }
  const Polynomial& operator[](std::size_t j) const { return components_[j]; }
  const std::vector<Polynomial>& components() const { return components_; }

  bool is_zero() const;
  bool is_constant() const;
  /// Value of a constant field; throws std::logic_error if not constant.
  RationalVector constant_value() const;
  /// Max total degree over components; zero-polynomial sentinel if all vanish.
  Degree degree() const;
  /// The field with all constant terms removed.
  PolyVectorField without_constant_terms() const;

  std::vector<double> eval(std::span<const double> x) const;
  RationalVector eval_exact(std::span<const Rational> x) const;

  PolyVectorField& operator+=(const PolyVectorField& other);
  PolyVectorField& operator*=(const Rational& c);
  friend PolyVectorField operator+(PolyVectorField a, const PolyVectorField& b) { return a += b; }
  friend PolyVectorField operator-(PolyVectorField a, const PolyVectorField& b) {
    return a += b * Rational(-1);
  }
  friend PolyVectorField operator*(PolyVectorField a, const Rational& c) { return a *= c; }
  friend PolyVectorField operator*(const Rational& c, PolyVectorField a) { return a *= c; }
  friend bool operator==(const PolyVectorField&, const PolyVectorField&) = default;

  std::string to_string() const;

 private:
  std::vector<Polynomial> components_;
};

using PolyMatrix = std::vector<std::vector<Polynomial>>;

/// Entry (j, k) is dV^j/dx_k.
PolyMatrix jacobian(const PolyVectorField& v);

/// [V, W]^j = sum_k V^k dW^j/dx_k - W^k dV^j/dx_k.
PolyVectorField lie_bracket(const PolyVectorField& v, const PolyVectorField& w);

/// ad^m V (W): m-fold iterated bracket, ad^0 V (W) = W.
PolyVectorField ad_power(const PolyVectorField& v, const PolyVectorField& w, unsigned m);

/// Directional derivative along a constant vector, i.e. [v, W] for constant v.
PolyVectorField directional_derivative(const RationalVector& v, const PolyVectorField& w);

enum class Parity { kOdd, kEven, kSeed };
std::string to_string(Parity p);

struct RelativeDegree {
  unsigned n = 0;
  bool odd() const { return n % 2 == 1; }
};

/// n(V, W): maximal lambda-degree of lambda -> W(lambda v). std::nullopt when
/// every component of W(lambda v) is the zero polynomial.
std::optional<RelativeDegree> relative_degree(const RationalVector& v, const PolyVectorField& w);

struct Derivation;
using DerivationPtr = std::shared_ptr<const Derivation>;

/// Bracket-expression tree recording how a field was produced.
struct Derivation {
  enum class Kind { kDrift, kNoise, kCombination, kAdjoint };

  Kind kind = Kind::kDrift;
  std::size_t noise_index = 0;
  std::string label;  // leaf name, e.g. "X0", "X1", "X(1,0)"
  std::vector<std::pair<Rational, DerivationPtr>> terms;
  unsigned power = 0;
  DerivationPtr v;  // constant operand of ad^power
  DerivationPtr w;

  static DerivationPtr drift();
  static DerivationPtr noise(std::size_t index, std::string label);
  static DerivationPtr combination(std::vector<std::pair<Rational, DerivationPtr>> terms);
  static DerivationPtr adjoint(unsigned power, DerivationPtr v, DerivationPtr w);

  /// e.g. "ad^2(X1)(X0)" or "(1*X1 + -1*X2)".
  std::string to_string() const;
};

/// Re-evaluates a derivation tree through the bracket calculus.
PolyVectorField evaluate(const Derivation& d, const PolyVectorField& drift,
                         const std::vector<RationalVector>& noise);

struct ConstantField {
  RationalVector value;
  Parity parity = Parity::kSeed;
  DerivationPtr derivation;
};

}  // namespace hypocone
