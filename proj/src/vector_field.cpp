#include "hypocone/vector_field.hpp"

#include <sstream>
#include <stdexcept>

namespace hypocone {

namespace {

void require_same_dim(const PolyVectorField& a, const PolyVectorField& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch " +
                                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
}

}  // namespace

PolyVectorField::PolyVectorField(std::vector<Polynomial> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("vector field needs at least one component");
  for (const auto& c : components_) {
    if (c.dim() != components_.size()) {
      throw std::invalid_argument("vector field component has dimension " +
                                  std::to_string(c.dim()) + ", expected " +
                                  std::to_string(components_.size()));
    }
  }
}

PolyVectorField PolyVectorField::zero(std::size_t dim) {
  return PolyVectorField(std::vector<Polynomial>(dim, Polynomial(dim)));
}

PolyVectorField PolyVectorField::constant(const RationalVector& value) {
  std::vector<Polynomial> comps;
  comps.reserve(value.size());
  for (const auto& c : value) comps.push_back(Polynomial::constant(value.size(), c));
  return PolyVectorField(std::move(comps));
}

bool PolyVectorField::is_zero() const {
  for (const auto& c : components_) {
    if (!c.is_zero()) return false;
  }
  return true;
}

bool PolyVectorField::is_constant() const {
  for (const auto& c : components_) {
    if (!c.is_constant()) return false;
  }
  return true;
}

RationalVector PolyVectorField::constant_value() const {
  if (!is_constant()) throw std::logic_error("constant_value of a non-constant field");
  RationalVector out;
  out.reserve(dim());
  for (const auto& c : components_) out.push_back(c.constant_term());
  return out;
}

Degree PolyVectorField::degree() const {
  Degree best = Degree::zero_polynomial();
  for (const auto& c : components_) {
    const Degree d = c.degree();
    if (d.is_zero_polynomial()) continue;
    if (best.is_zero_polynomial() || d.value > best.value) best = d;
  }
  return best;
}

PolyVectorField PolyVectorField::without_constant_terms() const {
  PolyVectorField out = *this;
  const Exponent origin(dim(), 0);
  for (auto& c : out.components_) c.add_term(origin, -c.constant_term());
  return out;
}

std::vector<double> PolyVectorField::eval(std::span<const double> x) const {
  std::vector<double> out;
  out.reserve(dim());
  for (const auto& c : components_) out.push_back(c.eval(x));
  return out;
}

RationalVector PolyVectorField::eval_exact(std::span<const Rational> x) const {
  RationalVector out;
  out.reserve(dim());
  for (const auto& c : components_) out.push_back(c.eval_exact(x));
  return out;
}

PolyVectorField& PolyVectorField::operator+=(const PolyVectorField& other) {
  require_same_dim(*this, other, "vector field sum");
  for (std::size_t j = 0; j < dim(); ++j) components_[j] += other.components_[j];
  return *this;
}

PolyVectorField& PolyVectorField::operator*=(const Rational& c) {
  for (auto& comp : components_) comp *= c;
  return *this;
}

std::string PolyVectorField::to_string() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t j = 0; j < dim(); ++j) {
    if (j) os << ", ";
    os << components_[j].to_string();
  }
  os << ")";
  return os.str();
}

PolyMatrix jacobian(const PolyVectorField& v) {
  PolyMatrix out;
  out.reserve(v.dim());
  for (std::size_t j = 0; j < v.dim(); ++j) {
    std::vector<Polynomial> row;
    row.reserve(v.dim());
    for (std::size_t k = 0; k < v.dim(); ++k) row.push_back(v[j].derivative(k));
    out.push_back(std::move(row));
  }
  return out;
}

PolyVectorField directional_derivative(const RationalVector& v, const PolyVectorField& w) {
  if (v.size() != w.dim()) throw std::invalid_argument("directional derivative: dimension mismatch");
  std::vector<Polynomial> comps(w.dim(), Polynomial(w.dim()));
  for (std::size_t k = 0; k < w.dim(); ++k) {
    if (v[k] == 0) continue;
    for (std::size_t j = 0; j < w.dim(); ++j) comps[j] += w[j].derivative(k) * v[k];
  }
  return PolyVectorField(std::move(comps));
}

PolyVectorField lie_bracket(const PolyVectorField& v, const PolyVectorField& w) {
  require_same_dim(v, w, "lie_bracket");
  const std::size_t d = v.dim();
  std::vector<Polynomial> comps(d, Polynomial(d));
  for (std::size_t k = 0; k < d; ++k) {
    const bool v_k_zero = v[k].is_zero();
    const bool w_k_zero = w[k].is_zero();
    for (std::size_t j = 0; j < d; ++j) {
      if (!v_k_zero) comps[j] += v[k] * w[j].derivative(k);
      if (!w_k_zero) comps[j] -= w[k] * v[j].derivative(k);
    }
  }
  return PolyVectorField(std::move(comps));
}

PolyVectorField ad_power(const PolyVectorField& v, const PolyVectorField& w, unsigned m) {
  require_same_dim(v, w, "ad_power");
  PolyVectorField out = w;
  if (v.is_constant()) {
    const RationalVector value = v.constant_value();
    for (unsigned i = 0; i < m; ++i) out = directional_derivative(value, out);
    return out;
  }
  for (unsigned i = 0; i < m; ++i) out = lie_bracket(v, out);
  return out;
}

std::string to_string(Parity p) {
  switch (p) {
    case Parity::kOdd: return "odd";
    case Parity::kEven: return "even";
    case Parity::kSeed: return "seed";
  }
  return "?";
}

std::optional<RelativeDegree> relative_degree(const RationalVector& v, const PolyVectorField& w) {
  if (v.size() != w.dim()) throw std::invalid_argument("relative_degree: dimension mismatch");
  std::optional<RelativeDegree> best;
  for (const auto& comp : w.components()) {
    const auto coeffs = comp.restrict_to_line(v);
    if (coeffs.empty()) continue;
    const unsigned n = static_cast<unsigned>(coeffs.size() - 1);
    if (!best || n > best->n) best = RelativeDegree{n};
  }
  return best;
}

DerivationPtr Derivation::drift() {
  auto d = std::make_shared<Derivation>();
  d->kind = Kind::kDrift;
  d->label = "X0";
  return d;
}

DerivationPtr Derivation::noise(std::size_t index, std::string label) {
  auto d = std::make_shared<Derivation>();
  d->kind = Kind::kNoise;
  d->noise_index = index;
  d->label = std::move(label);
  return d;
}

DerivationPtr Derivation::combination(std::vector<std::pair<Rational, DerivationPtr>> terms) {
  auto d = std::make_shared<Derivation>();
  d->kind = Kind::kCombination;
  d->terms = std::move(terms);
  return d;
}

DerivationPtr Derivation::adjoint(unsigned power, DerivationPtr v, DerivationPtr w) {
  auto d = std::make_shared<Derivation>();
  d->kind = Kind::kAdjoint;
  d->power = power;
  d->v = std::move(v);
  d->w = std::move(w);
  return d;
}

std::string Derivation::to_string() const {
  switch (kind) {
    case Kind::kDrift:
    case Kind::kNoise:
      return label;
    case Kind::kCombination: {
      std::string s = "(";
      for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i) s += " + ";
        s += format_rational(terms[i].first) + "*" + terms[i].second->to_string();
      }
      return s + ")";
    }
    case Kind::kAdjoint:
      return "ad^" + std::to_string(power) + "(" + v->to_string() + ")(" + w->to_string() + ")";
  }
  return "?";
}

PolyVectorField evaluate(const Derivation& d, const PolyVectorField& drift,
                         const std::vector<RationalVector>& noise) {
  switch (d.kind) {
    case Derivation::Kind::kDrift:
      return drift;
    case Derivation::Kind::kNoise:
      return PolyVectorField::constant(noise.at(d.noise_index));
    case Derivation::Kind::kCombination: {
      auto sum = PolyVectorField::zero(drift.dim());
      for (const auto& [c, child] : d.terms) sum += evaluate(*child, drift, noise) * c;
      return sum;
    }
    case Derivation::Kind::kAdjoint:
      return ad_power(evaluate(*d.v, drift, noise), evaluate(*d.w, drift, noise), d.power);
  }
  throw std::logic_error("unknown derivation kind");
}

}  // namespace hypocone
