#include "hypocone/poly_json.hpp"

#include <stdexcept>

namespace hypocone {

using nlohmann::json;

json to_json(const Polynomial& p) {
  json out = json::array();
  for (const auto& [e, c] : p.terms()) {
    out.push_back({{"coeff", format_rational(c)}, {"exps", e}});
  }
  return out;
}

json to_json(const PolyVectorField& v) {
  json out = json::array();
  for (const auto& comp : v.components()) out.push_back(to_json(comp));
  return out;
}

json to_json(const RationalVector& v) {
  json out = json::array();
  for (const auto& q : v) out.push_back(format_rational(q));
  return out;
}

namespace {

Rational rational_from_json(const json& j, const std::string& where) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(where + ": " + e.what());
  }
  throw std::invalid_argument(where + ": expected a \"p/q\" string");
}

}  // namespace

Polynomial polynomial_from_json(const json& j, std::size_t dim, const std::string& where) {
  if (!j.is_array()) throw std::invalid_argument(where + ": polynomial must be a list of terms");
  Polynomial p(dim);
  for (std::size_t t = 0; t < j.size(); ++t) {
    const std::string at = where + "[" + std::to_string(t) + "]";
    const json& term = j[t];
    if (!term.is_object() || !term.contains("coeff") || !term.contains("exps")) {
      throw std::invalid_argument(at + ": term needs \"coeff\" and \"exps\"");
    }
    const json& exps = term["exps"];
    if (!exps.is_array()) throw std::invalid_argument(at + ".exps: expected a list");
    if (exps.size() != dim) {
      throw std::invalid_argument(at + ".exps: length " + std::to_string(exps.size()) +
                                  " does not match dimension " + std::to_string(dim));
    }
    Exponent e;
    e.reserve(dim);
    for (const auto& x : exps) {
      if (!x.is_number_unsigned()) {
        throw std::invalid_argument(at + ".exps: entries must be nonnegative integers");
      }
      e.push_back(x.get<std::uint32_t>());
    }
    const Rational c = rational_from_json(term["coeff"], at + ".coeff");
    if (c == 0) throw std::invalid_argument(at + ".coeff: zero coefficients are not stored");
    if (p.terms().contains(e)) throw std::invalid_argument(at + ".exps: duplicate exponent vector");
    p.add_term(e, c);
  }
  return p;
}

PolyVectorField vector_field_from_json(const json& j, std::size_t dim, const std::string& where) {
  if (!j.is_array()) throw std::invalid_argument(where + ": vector field must be a list");
  if (j.size() != dim) {
    throw std::invalid_argument(where + ": has " + std::to_string(j.size()) +
                                " components, expected " + std::to_string(dim));
  }
  std::vector<Polynomial> comps;
  comps.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    comps.push_back(polynomial_from_json(j[i], dim, where + "[" + std::to_string(i) + "]"));
  }
  return PolyVectorField(std::move(comps));
}

RationalVector rational_vector_from_json(const json& j, std::size_t dim, const std::string& where) {
  if (!j.is_array() || j.size() != dim) {
    throw std::invalid_argument(where + ": expected a list of " + std::to_string(dim) +
                                " rationals");
  }
  RationalVector out;
  out.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    out.push_back(rational_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace hypocone
