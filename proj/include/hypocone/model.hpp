#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypocone/vector_field.hpp"

namespace hypocone {

/// Thrown for malformed model files and invalid builtin parameters.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A bracket whose value is known in closed form for a builtin model.
struct KnownBracket {
  std::string expression;  // e.g. "[X1,X0]" or "ad^2(X1)(X0)"
  PolyVectorField expected;
};

/// The cone C as stated for a builtin model, used as a golden value.
struct ExpectedCone {
  std::vector<RationalVector> odd_span;
  std::vector<RationalVector> even_cone;  // primitive directions, modulo the odd span
};

struct ClosedFormFacts {
  std::vector<KnownBracket> brackets;
  std::optional<ExpectedCone> cone;
  /// Distance from y to the closed-form equilibrium family (absent if none registered).
  std::function<double(std::span<const double> y)> equilibrium_distance;
  /// One closed-form equilibrium point, if available.
  std::optional<std::vector<double>> sample_equilibrium;
};

/// dx = X0(x) dt + sum_j X_j dW^j with polynomial X0 and constant X_j.
struct ModelSpec {
  std::string name;
  std::size_t d = 0;
  PolyVectorField drift = PolyVectorField::zero(1);
  std::vector<RationalVector> noise;
  std::vector<std::string> noise_labels;
  std::map<std::string, Rational> params;
  int default_ball_n = 10;
  /// Extra constant fields addressable by name in bracket expressions.
  std::map<std::string, RationalVector> named_fields;
  /// Optional display names for the state coordinates (empty: x1..xd).
  std::vector<std::string> coordinate_names;
  ClosedFormFacts facts;

  std::string coordinate_name(std::size_t i) const {
    return i < coordinate_names.size() ? coordinate_names[i] : "x" + std::to_string(i + 1);
  }

  std::size_t r() const { return noise.size(); }
  /// Throws ModelError if the invariants (dimensions, labels) are violated.
  void validate() const;
};

ModelSpec langevin(std::size_t d, const Rational& gamma, const std::vector<RationalVector>& sigmas,
                   const Polynomial& potential);
/// F(y) = 1/4 |y|^4 - 1/2 |y|^2 on R^d.
Polynomial quartic_double_well(std::size_t d);

ModelSpec bhw(const Rational& a1, const Rational& a2, const Rational& alpha1,
              const Rational& alpha2, const Rational& eps);

using Mode = std::pair<int, int>;

/// Index set {k in Z^2 \ {0} : |k|_inf <= n}, ordered by shell then lexicographically.
std::vector<Mode> burgers_modes(int n);
/// Coordinate of Re w_k in the realified Burgers state; Im w_k, Re q_k, Im q_k follow.
std::size_t burgers_coordinate(int n, const Mode& k);

ModelSpec burgers(int n, const Rational& nu, const std::set<Mode>& forced_sigma,
                  const std::set<Mode>& forced_gamma);
std::set<Mode> low_modes();  // |k|_inf = 1

ModelSpec nonexample3d();

nlohmann::json model_to_json(const ModelSpec& spec);
ModelSpec model_from_json(const nlohmann::json& j);
ModelSpec load_model(const std::string& path);
void save_model(const ModelSpec& spec, const std::string& path);

/// Evaluates "X0", a noise label, a named field, "[A,B]" or "ad^n(A)(B)".
PolyVectorField evaluate_bracket_expression(const ModelSpec& spec, std::string_view expr);

struct BuiltinInfo {
  std::string name;
  std::string summary;
  std::string parameters;  // accepted --param keys with defaults
};

std::vector<BuiltinInfo> builtin_models();
/// Builds a builtin from string parameters (defaults filled in). Throws ModelError.
ModelSpec make_builtin(const std::string& name, const std::map<std::string, std::string>& params);

}  // namespace hypocone
