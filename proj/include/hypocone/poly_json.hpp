#pragma once

#include <nlohmann/json.hpp>

#include "hypocone/vector_field.hpp"

namespace hypocone {

// Wire format: a polynomial is a JSON list of {"coeff": "p/q", "exps": [...]},
// in canonical grlex order; a vector field is a list of such lists.

nlohmann::json to_json(const Polynomial& p);
nlohmann::json to_json(const PolyVectorField& v);
nlohmann::json to_json(const RationalVector& v);

/// `where` prefixes error messages, e.g. "drift[1]".
Polynomial polynomial_from_json(const nlohmann::json& j, std::size_t dim, const std::string& where);
PolyVectorField vector_field_from_json(const nlohmann::json& j, std::size_t dim,
                                       const std::string& where);
RationalVector rational_vector_from_json(const nlohmann::json& j, std::size_t dim,
                                         const std::string& where);

}  // namespace hypocone
