#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hypocone/model.hpp"

namespace hypocone {

/// Piecewise-constant control h on [0, horizon]; H = int h is piecewise linear.
struct ControlPath {
  double horizon = 0.0;
  std::vector<double> breakpoints;     // 0 = b_0 < b_1 < ... < b_p = horizon
  std::vector<Eigen::VectorXd> values; // values[i] applies on [b_i, b_{i+1})

  std::size_t pieces() const { return values.size(); }
  /// Throws std::invalid_argument if the invariants do not hold.
  void validate(std::size_t r) const;

  static ControlPath uniform(double horizon, std::size_t pieces, std::size_t r);
  /// Stacked control values, piece-major.
  Eigen::VectorXd flatten() const;
  void assign(const Eigen::VectorXd& flat);
  /// Concatenates b after a in time.
  static ControlPath concat(const ControlPath& a, const ControlPath& b);
};

/// The state left every finite value behind before the horizon.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(double time, const std::string& what)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

struct FlowOptions {
  std::size_t min_steps = 2000;  // over the whole horizon
  bool refine = true;            // halve the step until successive results agree
  double refine_tol = 1e-8;
  int max_halvings = 6;
};

/// Uniformly spaced run of nodes with constant control (one per control piece).
struct FlowSegment {
  std::size_t first = 0;  // node indices, last - first is even
  std::size_t last = 0;
  std::size_t piece = 0;
};

struct FlowResult {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> trajectory;  // Phi at each node
  std::vector<Eigen::MatrixXd> j0s;         // J_{0,s} at each node
  std::vector<FlowSegment> segments;
  std::vector<Eigen::VectorXd> segment_controls;
  bool exited = false;
  double exit_time = 0.0;
  double max_norm = 0.0;
  double cond_j = 1.0;        // worst condition number of J_{0,s}
  std::size_t steps = 0;
  bool converged = true;      // step-halving agreement reached
  double refinement_change = 0.0;

  const Eigen::VectorXd& terminal() const { return trajectory.back(); }
};

FlowResult integrate_flow(const ModelSpec& model, const Eigen::VectorXd& x,
                          const ControlPath& control, double n_ball,
                          const FlowOptions& options = {});

struct GramianResult {
  Eigen::MatrixXd m;
  double sigma_min = 0.0;
  double eps_gram = 0.0;  // 1e-8 * trace(M) / d
  bool used_backward = false;
  bool conclusive = true;
};

inline constexpr double kCondFallback = 1e8;

/// M_t = sum_m int_0^t (J_{s,t} X_m)(J_{s,t} X_m)^T ds by composite Simpson.
GramianResult gramian(const FlowResult& flow, const ModelSpec& model);
/// The same integral with J_{s,t} from backward integration of
/// d/ds J_{s,t} = -J_{s,t} DX0(Phi_s); used when J_{0,s} is ill-conditioned.
GramianResult gramian_backward(const FlowResult& flow, const ModelSpec& model);

/// J_{s,t} at every node, by factorization J_{0,t} J_{0,s}^{-1}.
std::vector<Eigen::MatrixXd> transition_to_end(const FlowResult& flow);

/// Numerical rank of {X_m} and {[X0, X_m](Phi_s)} over interior nodes.
std::size_t k_rank(const FlowResult& flow, const ModelSpec& model, double rel_tol = 1e-9);

/// d Phi_t / d(control values): column (piece * r + m) = int_{piece} J_{s,t} X_m ds.
Eigen::MatrixXd control_sensitivity(const FlowResult& flow, const ModelSpec& model);

/// Smallest integer n with the sampled trajectory, widened by a relative 1e-6 margin,
/// inside the open ball B_n(0).
int enclosing_ball(const FlowResult& flow);

Eigen::MatrixXd noise_matrix(const ModelSpec& model);

}  // namespace hypocone
