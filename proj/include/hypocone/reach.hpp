#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hypocone/closure.hpp"
#include "hypocone/equilibria.hpp"
#include "hypocone/flow.hpp"

namespace hypocone {

struct SynthesisOptions {
  int n_starts = 8;          // including the zero start
  int max_iterations = 200;  // Levenberg-Marquardt iterations per start
  double eps_reach_factor = 1e-5;
  std::size_t solver_steps = 2000;  // RK4 steps over the leg during the search
  bool parallel = true;
};

struct LegResult {
  bool success = false;
  ControlPath control;
  double error = 0.0;  // refined re-integration
  int start = -1;      // winning start index
  int iterations = 0;
};

/// eps_reach = factor * (1 + |to|).
double reach_tolerance(const Eigen::VectorXd& to, double factor = 1e-5);

/// Steers from -> to in time t_leg with `pieces` constant control pieces.
LegResult synthesize_leg(const ModelSpec& model, const Eigen::VectorXd& from, const Eigen::VectorXd& to,
                         double t_leg, std::size_t pieces, std::uint64_t seed,
                         const SynthesisOptions& options = {});

/// Levenberg-Marquardt refinement of an existing control from `from` towards `to`.
LegResult polish_control(const ModelSpec& model, const Eigen::VectorXd& from, const Eigen::VectorXd& to,
                         ControlPath control, const SynthesisOptions& options = {});

/// Gradient of 1/2 |Phi_t - to|^2 with respect to the flattened control values.
Eigen::VectorXd terminal_gradient(const ModelSpec& model, const Eigen::VectorXd& from, const Eigen::VectorXd& to,
                                  const ControlPath& control, std::size_t steps = 2000);

struct Waypoint {
  std::string kind;  // "start", "twist", "equilibrium", "dwell", "target"
  Eigen::VectorXd point;
  double t_start = 0.0;
  double t_end = 0.0;
};

enum class Verdict { kPositive, kInconclusive };
std::string to_string(Verdict v);

struct CertifyOptions {
  bool via_equilibrium = false;
  std::optional<Eigen::VectorXd> equilibrium;  // explicit y; searched when absent
  std::optional<Box> equilibrium_box;          // default: bounding box of x, z with margin
  int equilibrium_starts = 64;
  std::size_t pieces_per_leg = 8;
  std::size_t max_pieces_per_leg = 32;
  int twist_budget = 6;
  std::uint64_t seed = 1;
  SynthesisOptions synthesis;
};

struct ReachabilityCertificate {
  std::string model;
  Eigen::VectorXd x;
  Eigen::VectorXd z;
  double t = 0.0;
  std::vector<Waypoint> waypoints;
  ControlPath control;
  double terminal_error = 0.0;
  double eps_reach = 0.0;
  double sigma_min = 0.0;
  double eps_gram = 0.0;
  Eigen::MatrixXd gramian;
  std::size_t k_rank = 0;
  int ball_n = 0;
  Verdict verdict = Verdict::kInconclusive;
  std::string stage;   // failing stage when inconclusive
  std::string reason;
  int twist_points = 0;
  int twist_budget = 0;
  bool twist_rank_ok = false;
  bool gramian_backward = false;
  bool flow_converged = false;
  std::optional<FlowResult> flow;

  nlohmann::json to_json() const;
};

ReachabilityCertificate certify(const ModelSpec& model, const PositivityBasis& basis, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& z, double t, const CertifyOptions& options = {});

/// Rows "s,phi_1,...,phi_d".
void write_trajectory_csv(const FlowResult& flow, const std::string& path);

}  // namespace hypocone
