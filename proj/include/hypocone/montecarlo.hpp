#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hypocone/model.hpp"

namespace hypocone {

struct SimConfig {
  double t = 1.0;
  double dt = 0.0;  // 0 selects t / 4000
  double n_ball = 10.0;
  std::uint64_t n_paths = 100000;
  std::uint64_t seed = 0;
  Eigen::VectorXd z;
  double delta = 0.25;

  double step() const { return dt > 0.0 ? dt : t / 4000.0; }
  std::uint64_t steps() const;
  void validate(std::size_t d) const;  // throws std::invalid_argument
};

struct PositivityEvidence {
  std::uint64_t hits = 0;
  std::uint64_t n_paths = 0;
  std::uint64_t stopped = 0;
  std::uint64_t nonfinite = 0;  // diagnostics: non-finite state before leaving the ball
  double lower_cb = 0.0;        // Clopper-Pearson lower bound, two-sided 99%
  double stopped_fraction = 0.0;

  double hit_fraction() const { return n_paths ? static_cast<double>(hits) / static_cast<double>(n_paths) : 0.0; }
  nlohmann::json to_json() const;
  bool operator==(const PositivityEvidence&) const = default;
};

/// Lower end of the two-sided Clopper-Pearson interval at the given confidence.
double clopper_pearson_lower(std::uint64_t hits, std::uint64_t n, double confidence = 0.99);

/// Stopped Euler-Maruyama, paths run in parallel.
PositivityEvidence simulate(const ModelSpec& model, const Eigen::VectorXd& x, const SimConfig& cfg);
/// Single-threaded reference with the same per-path streams.
PositivityEvidence simulate_serial(const ModelSpec& model, const Eigen::VectorXd& x, const SimConfig& cfg);

/// Terminal state of one path (frozen at the first exit); exposed for testing.
struct PathEnd {
  Eigen::VectorXd state;
  bool stopped = false;
  bool nonfinite = false;
};
PathEnd simulate_path(const ModelSpec& model, const Eigen::VectorXd& x, const SimConfig& cfg, std::uint64_t path);

struct HeatmapGrid {
  std::size_t coord_a = 0;
  std::size_t coord_b = 1;
  double lo_a = -3.0, hi_a = 3.0;
  double lo_b = -3.0, hi_b = 3.0;
  std::size_t nx = 60, ny = 60;
};

/// counts(i, j): unstopped endpoints with coordinate a in bin i and b in bin j.
Eigen::MatrixXi density_heatmap(const ModelSpec& model, const Eigen::VectorXd& x, const SimConfig& cfg,
                                const HeatmapGrid& grid);
void write_heatmap_csv(const Eigen::MatrixXi& counts, const HeatmapGrid& grid, const std::string& path);

}  // namespace hypocone
