#include "hypocone/polynomial.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace hypocone {

std::uint32_t total_degree(const Exponent& e) {
  return std::accumulate(e.begin(), e.end(), std::uint32_t{0});
}

bool GrlexLess::operator()(const Exponent& a, const Exponent& b) const {
  const auto da = total_degree(a);
  const auto db = total_degree(b);
  if (da != db) return da < db;
  // Within a degree the larger leading exponent sorts later.
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

Polynomial::Polynomial(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw std::invalid_argument("polynomial dimension must be positive");
}

Polynomial Polynomial::constant(std::size_t dim, const Rational& c) {
  Polynomial p(dim);
  p.add_term(Exponent(dim, 0), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t dim, std::size_t index) {
  if (index >= dim) throw std::out_of_range("variable index out of range");
  Exponent e(dim, 0);
  e[index] = 1;
  Polynomial p(dim);
  p.add_term(e, 1);
  return p;
}

Polynomial Polynomial::monomial(const Rational& c, Exponent exps) {
  Polynomial p(exps.size());
  p.add_term(exps, c);
  return p;
}

bool Polynomial::is_constant() const {
  if (terms_.empty()) return true;
  return terms_.size() == 1 && total_degree(terms_.begin()->first) == 0;
}

Rational Polynomial::constant_term() const {
  auto it = terms_.find(Exponent(dim_, 0));
  return it == terms_.end() ? Rational(0) : it->second;
}

Degree Polynomial::degree() const {
  if (terms_.empty()) return Degree::zero_polynomial();
  // Grlex order puts the highest total degree last.
  return Degree::finite(total_degree(terms_.rbegin()->first));
}

void Polynomial::add_term(const Exponent& exps, const Rational& c) {
  if (exps.size() != dim_) {
    throw std::invalid_argument("exponent vector length " + std::to_string(exps.size()) +
                                " does not match polynomial dimension " + std::to_string(dim_));
  }
  // mpq arithmetic assumes canonical operands; Rational(p, q) is not canonicalized on construction.
  Rational cc = c;
  cc.canonicalize();
  if (cc == 0) return;
  auto [it, inserted] = terms_.try_emplace(exps, cc);
  if (!inserted) {
    it->second += cc;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial Polynomial::derivative(std::size_t var) const {
  if (var >= dim_) throw std::out_of_range("derivative variable out of range");
  Polynomial out(dim_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponent de = e;
    --de[var];
    out.terms_.emplace_hint(out.terms_.end(), std::move(de), c * e[var]);
  }
  return out;
}

Rational Polynomial::eval_exact(std::span<const Rational> x) const {
  if (x.size() != dim_) {
    throw std::invalid_argument("eval: point has " + std::to_string(x.size()) +
                                " coordinates, polynomial has dimension " + std::to_string(dim_));
  }
  Rational sum = 0;
  Rational term;
  for (const auto& [e, c] : terms_) {
    term = c;
    for (std::size_t i = 0; i < dim_ && term != 0; ++i) {
      for (std::uint32_t k = 0; k < e[i]; ++k) term *= x[i];
    }
    sum += term;
  }
  return sum;
}

double Polynomial::eval(std::span<const double> x) const {
  if (x.size() != dim_) {
    throw std::invalid_argument("eval: point has " + std::to_string(x.size()) +
                                " coordinates, polynomial has dimension " + std::to_string(dim_));
  }
  RationalVector exact;
  exact.reserve(x.size());
  for (double v : x) exact.push_back(rational_from_double(v));
  return eval_exact(exact).get_d();
}

RationalVector Polynomial::restrict_to_line(std::span<const Rational> v) const {
  if (v.size() != dim_) throw std::invalid_argument("restrict_to_line: dimension mismatch");
  RationalVector coeffs;
  Rational term;
  for (const auto& [e, c] : terms_) {
    term = c;
    for (std::size_t i = 0; i < dim_ && term != 0; ++i) {
      for (std::uint32_t k = 0; k < e[i]; ++k) term *= v[i];
    }
    if (term == 0) continue;
    const auto deg = total_degree(e);
    if (coeffs.size() <= deg) coeffs.resize(deg + 1, Rational(0));
    coeffs[deg] += term;
  }
  while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
  return coeffs;
}

void Polynomial::check_same_dim(const Polynomial& other) const {
  if (other.dim_ != dim_) {
    throw std::invalid_argument("polynomial dimension mismatch: " + std::to_string(dim_) + " vs " +
                                std::to_string(other.dim_));
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  check_same_dim(other);
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  check_same_dim(other);
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
  Rational cc = c;
  cc.canonicalize();
  if (cc == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, coeff] : terms_) coeff *= cc;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  a.check_same_dim(b);
  Polynomial out(a.dim_);
  Exponent e(a.dim_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t i = 0; i < a.dim_; ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

Polynomial Polynomial::operator-() const {
  Polynomial out = *this;
  for (auto& [e, c] : out.terms_) c = -c;
  return out;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Highest degree first reads more naturally.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    Rational mag = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    const bool is_unit_monomial = total_degree(e) > 0 && mag == 1;
    if (!is_unit_monomial) os << format_rational(mag);
    bool need_star = !is_unit_monomial;
    for (std::size_t i = 0; i < dim_; ++i) {
      if (e[i] == 0) continue;
      if (need_star) os << "*";
      os << "x" << (i + 1);
      if (e[i] > 1) os << "^" << e[i];
      need_star = true;
    }
  }
  return os.str();
}

}  // namespace hypocone
