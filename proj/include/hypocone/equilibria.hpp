#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hypocone/closure.hpp"
#include "hypocone/model.hpp"

namespace hypocone {

struct EquilibriumPoint {
  Eigen::VectorXd y;
  Eigen::VectorXd u;  // least-squares control, length r
  double residual = 0.0;
};

inline constexpr double kEquilibriumTol = 1e-10;

struct EquilibriumCheck {
  bool ok = false;
  Eigen::VectorXd u;
  double residual = 0.0;
};

/// u = argmin |X0(y) + B u|; residual is the remaining norm.
EquilibriumCheck is_equilibrium(const ModelSpec& model, const Eigen::VectorXd& y, double tol = kEquilibriumTol);

/// Exact test for rational y: the component of X0(y) orthogonal to span{X_j} vanishes.
struct ExactEquilibriumCheck {
  bool ok = false;
  Rational residual_squared;
};
ExactEquilibriumCheck is_equilibrium_exact(const ModelSpec& model, const RationalVector& y);

struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  void validate(std::size_t d) const;  // throws std::invalid_argument
  Eigen::VectorXd center() const { return 0.5 * (lo + hi); }
  bool contains(const Eigen::VectorXd& y, double slack = 0.0) const;
};

struct EquilibriumSearchOptions {
  int max_iterations = 60;
  double tol = kEquilibriumTol;
  double dedupe_radius = 1e-6;
  bool parallel = true;
};

/// Gauss-Newton on P_perp X0(y) = 0 from n_starts quasi-random starts in the box.
/// Results are sorted by (residual, lexicographic y) and deduplicated.
std::vector<EquilibriumPoint> find_equilibria(const ModelSpec& model, const Box& box, int n_starts,
                                              std::uint64_t seed, const EquilibriumSearchOptions& options = {});

struct PositivityChain {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd z;
  Membership y_in_dx;
  Membership z_in_dy;
  EquilibriumPoint equilibrium;
};

/// Among candidates with y in D(x) and z in D(y), the one closest to x.
std::optional<PositivityChain> build_chain(const ModelSpec& model, const PositivityBasis& basis,
                                           const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                                           const std::vector<EquilibriumPoint>& equilibria);

}  // namespace hypocone
