#include "hypocone/montecarlo.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

#include "hypocone/compiled_field.hpp"
#include "hypocone/flow.hpp"

namespace hypocone {

std::uint64_t SimConfig::steps() const {
  return static_cast<std::uint64_t>(std::llround(t / step()));
}

void SimConfig::validate(std::size_t d) const {
  if (!(t > 0.0)) throw std::invalid_argument("sim: t must be positive");
  if (!(step() > 0.0) || step() > t / 100.0 * (1.0 + 1e-12)) throw std::invalid_argument("sim: dt must be in (0, t/100]");
  if (!(delta > 0.0)) throw std::invalid_argument("sim: delta must be positive");
  if (static_cast<std::size_t>(z.size()) != d) throw std::invalid_argument("sim: target has wrong dimension");
  if (n_ball < z.norm() + delta) throw std::invalid_argument("sim: the hit ball must lie inside B_n (n_ball >= |z| + delta)");
  if (n_paths == 0) throw std::invalid_argument("sim: need at least one path");
}

nlohmann::json PositivityEvidence::to_json() const {
  return {{"hits", hits},       {"n_paths", n_paths},   {"lower_cb", lower_cb},
          {"stopped", stopped}, {"stopped_fraction", stopped_fraction}, {"nonfinite", nonfinite},
          {"hit_fraction", hit_fraction()}};
}

double clopper_pearson_lower(std::uint64_t hits, std::uint64_t n, double confidence) {
  if (n == 0 || hits > n) throw std::invalid_argument("clopper_pearson_lower: need 0 <= hits <= n, n > 0");
  if (hits == 0) return 0.0;
  const double alpha = 1.0 - confidence;
  return boost::math::ibeta_inv(static_cast<double>(hits), static_cast<double>(n - hits + 1), alpha / 2.0);
}

namespace {

// One independent stream per path, keyed only by (seed, path index).
std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t path) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
  return std::mt19937_64(seq);
}

struct Kernel {
  CompiledField x0;
  // Nonzero entries of each noise column as (row, value).
  std::vector<std::vector<std::pair<Eigen::Index, double>>> columns;

  Kernel(const ModelSpec& model) : x0(model.drift) {
    const Eigen::MatrixXd b = noise_matrix(model);
    columns.resize(static_cast<std::size_t>(b.cols()));
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      for (Eigen::Index i = 0; i < b.rows(); ++i)
        if (b(i, j) != 0.0) columns[static_cast<std::size_t>(j)].emplace_back(i, b(i, j));
  }
};

PathEnd run_path(const Kernel& k, const Eigen::VectorXd& x, const SimConfig& cfg, std::uint64_t path) {
  auto rng = path_engine(cfg.seed, path);
  std::normal_distribution<double> normal;
  const double dt = cfg.step();
  const double sdt = std::sqrt(dt);
  const std::uint64_t steps = cfg.steps();
  const double ball2 = cfg.n_ball * cfg.n_ball;
  const auto d = x.size();
  PathEnd end;
  end.state = x;
  double* state = end.state.data();
  std::vector<double> drift(static_cast<std::size_t>(d));
  for (std::uint64_t s = 0; s < steps; ++s) {
    k.x0.eval(state, drift.data());
    for (Eigen::Index i = 0; i < d; ++i) state[i] += dt * drift[static_cast<std::size_t>(i)];
    for (const auto& col : k.columns) {
      const double dw = sdt * normal(rng);
      for (const auto& [row, v] : col) state[row] += v * dw;
    }
    double n2 = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) n2 += state[i] * state[i];
    if (!std::isfinite(n2)) {
      end.nonfinite = true;
      end.stopped = true;
      return end;
    }
    if (n2 >= ball2) {
      end.stopped = true;
      return end;
    }
  }
  return end;
}

PositivityEvidence run(const ModelSpec& model, const Eigen::VectorXd& x, const SimConfig& cfg, bool parallel) {
  cfg.validate(model.d);
  if (static_cast<std::size_t>(x.size()) != model.d) throw std::invalid_argument("sim: start has wrong dimension");
  const Kernel k(model);
  const auto n = static_cast<std::int64_t>(cfg.n_paths);
  std::uint64_t hits = 0, stopped = 0, nonfinite = 0;
#pragma omp parallel for schedule(static) reduction(+ : hits, stopped, nonfinite) if (parallel)
  for (std::int64_t p = 0; p < n; ++p) {
    const PathEnd e = run_path(k, x, cfg, static_cast<std::uint64_t>(p));
    stopped += e.stopped ? 1 : 0;
    nonfinite += e.nonfinite ? 1 : 0;
    hits += (!e.stopped && (e.state - cfg.z).norm() <= cfg.delta) ? 1 : 0;
  }
  PositivityEvidence ev;
  ev.hits = hits;
  ev.n_paths = cfg.n_paths;
  ev.stopped = stopped;
  ev.nonfinite = nonfinite;
  ev.stopped_fraction = static_cast<double>(stopped) / static_cast<double>(cfg.n_paths);
  ev.lower_cb = clopper_pearson_lower(hits, cfg.n_paths);
  return ev;
}

}  // namespace

PathEnd simulate_path(const ModelSpec& model, const Eigen::VectorXd& x, const SimConfig& cfg, std::uint64_t path) {
  const Kernel k(model);
  return run_path(k, x, cfg, path);
}

PositivityEvidence simulate(const ModelSpec& model, const Eigen::VectorXd& x, const SimConfig& cfg) {
  return run(model, x, cfg, true);
}

PositivityEvidence simulate_serial(const ModelSpec& model, const Eigen::VectorXd& x, const SimConfig& cfg) {
  return run(model, x, cfg, false);
}

Eigen::MatrixXi density_heatmap(const ModelSpec& model, const Eigen::VectorXd& x, const SimConfig& cfg,
                                const HeatmapGrid& grid) {
  cfg.validate(model.d);
  if (grid.coord_a >= model.d || grid.coord_b >= model.d || grid.coord_a == grid.coord_b)
    throw std::invalid_argument("heatmap: need two distinct coordinates within the state dimension");
  if (grid.nx == 0 || grid.ny == 0 || !(grid.hi_a > grid.lo_a) || !(grid.hi_b > grid.lo_b))
    throw std::invalid_argument("heatmap: degenerate grid");
  const Kernel k(model);
  const auto n = static_cast<std::int64_t>(cfg.n_paths);
  std::vector<std::int64_t> bins(cfg.n_paths, -1);
#pragma omp parallel for schedule(static)
  for (std::int64_t p = 0; p < n; ++p) {
    const PathEnd e = run_path(k, x, cfg, static_cast<std::uint64_t>(p));
    if (e.stopped) continue;
    const double a = e.state(static_cast<Eigen::Index>(grid.coord_a));
    const double b = e.state(static_cast<Eigen::Index>(grid.coord_b));
    if (a < grid.lo_a || a >= grid.hi_a || b < grid.lo_b || b >= grid.hi_b) continue;
    const auto i = static_cast<std::int64_t>((a - grid.lo_a) / (grid.hi_a - grid.lo_a) * static_cast<double>(grid.nx));
    const auto j = static_cast<std::int64_t>((b - grid.lo_b) / (grid.hi_b - grid.lo_b) * static_cast<double>(grid.ny));
    bins[static_cast<std::size_t>(p)] = std::min<std::int64_t>(i, static_cast<std::int64_t>(grid.nx) - 1) * static_cast<std::int64_t>(grid.ny) +
                                        std::min<std::int64_t>(j, static_cast<std::int64_t>(grid.ny) - 1);
  }
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(grid.nx), static_cast<Eigen::Index>(grid.ny));
  for (const auto bin : bins)
    if (bin >= 0) counts(bin / static_cast<std::int64_t>(grid.ny), bin % static_cast<std::int64_t>(grid.ny)) += 1;
  return counts;
}

void write_heatmap_csv(const Eigen::MatrixXi& counts, const HeatmapGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "a_center,b_center,count\n";
  const double wa = (grid.hi_a - grid.lo_a) / static_cast<double>(grid.nx);
  const double wb = (grid.hi_b - grid.lo_b) / static_cast<double>(grid.ny);
  for (Eigen::Index i = 0; i < counts.rows(); ++i)
    for (Eigen::Index j = 0; j < counts.cols(); ++j)
      out << grid.lo_a + (static_cast<double>(i) + 0.5) * wa << "," << grid.lo_b + (static_cast<double>(j) + 0.5) * wb << ","
          << counts(i, j) << "\n";
}

}  // namespace hypocone
