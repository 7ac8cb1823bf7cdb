#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hypocone/model.hpp"
#include "hypocone/rational_span.hpp"

namespace hypocone {

struct NonconstantGenerator {
  PolyVectorField field;
  Parity parity = Parity::kEven;  // odd: usable with either sign; even: nonnegative multiples only
  DerivationPtr derivation;
};

/// State of the bracket iteration after `round` steps.
struct GenerationState {
  std::size_t dim = 0;
  std::vector<ConstantField> odd_constants;   // parity seed or odd; linearly independent
  std::vector<ConstantField> even_constants;  // parity even; distinct directions modulo the odd span
  std::vector<NonconstantGenerator> nonconstant_generators;
  int round = 0;
  bool last_round_added = true;
  bool truncated = false;  // a candidate cap was hit in some round

  RationalSpan odd_span{1};
  std::set<RationalVector> even_keys;
  std::set<std::string> generator_keys;
};

struct ClosureOptions {
  int max_rounds = 12;
  int combo_budget = 1;             // integer coefficients in [-budget, budget]
  std::size_t max_combos = 256;     // per side (V candidates, W candidates) and round
  std::size_t max_generators = 4096;
  bool parallel = true;
};

GenerationState closure_init(const ModelSpec& model);
GenerationState closure_step(const ModelSpec& model, const GenerationState& state,
                             const ClosureOptions& options = {});

/// The computed cone: span(odd_basis) + cone(even_generators).
struct ConeSpan {
  std::size_t dim = 0;
  std::vector<RationalVector> odd_basis;
  /// Primitive integer directions with the odd-span component removed.
  std::vector<RationalVector> even_generators;
  bool exhausted = false;
  int rounds = 0;
  std::vector<ConstantField> odd_fields;
  std::vector<ConstantField> even_fields;

  std::size_t rank() const;
  bool is_full_dim() const { return rank() == dim; }
};

ConeSpan cone_from_state(const GenerationState& state);
ConeSpan compute_C(const ModelSpec& model, const ClosureOptions& options = {});

/// Basis y_1..y_d with y_1..y_k spanning the odd part and y_{k+1}..y_d even generators.
struct PositivityBasis {
  std::vector<RationalVector> y;
  std::size_t k = 0;
  Eigen::MatrixXd matrix() const;  // columns are y
};

/// std::nullopt when the cone is not full-dimensional.
std::optional<PositivityBasis> choose_basis(const ConeSpan& cone);

struct Membership {
  bool member = false;
  Eigen::VectorXd coeffs;
};

inline constexpr double kStrictnessTol = 1e-9;

/// Is z in D(x) = x + span(y_1..y_k) + {sum lambda_j y_j : lambda_j > 0}?
/// Throws std::invalid_argument on a singular basis.
Membership d_membership(const PositivityBasis& basis, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& z, double strictness_tol = kStrictnessTol);

/// Rank of {X_m} together with {[X_m, X0](p)} over all points, compared to d.
bool twist_rank_check(const ModelSpec& model, const std::vector<Eigen::VectorXd>& points);

/// Numerical rank with singular values above rel_tol * largest.
std::size_t numerical_rank(const Eigen::MatrixXd& columns, double rel_tol = 1e-9);

}  // namespace hypocone
