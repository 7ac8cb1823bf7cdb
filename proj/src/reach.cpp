#include "hypocone/reach.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <stdexcept>

#include "hypocone/report.hpp"

namespace hypocone {

namespace {

constexpr double kNoBall = std::numeric_limits<double>::infinity();

std::optional<FlowResult> try_flow(const ModelSpec& model, const Eigen::VectorXd& from, const ControlPath& c,
                                   const FlowOptions& opts) {
  try {
    return integrate_flow(model, from, c, kNoBall, opts);
  } catch (const DivergenceError&) {
    return std::nullopt;
  }
}

double refined_error(const ModelSpec& model, const Eigen::VectorXd& from, const Eigen::VectorXd& to,
                     const ControlPath& c) {
  auto f = try_flow(model, from, c, FlowOptions{});
  return f ? (f->terminal() - to).norm() : kNoBall;
}

// Minimum-norm Levenberg-Marquardt on the terminal map.
LegResult levenberg_marquardt(const ModelSpec& model, const Eigen::VectorXd& from, const Eigen::VectorXd& to,
                              ControlPath control, const SynthesisOptions& options) {
  LegResult out;
  const FlowOptions fast{options.solver_steps, false};
  const double target = 0.05 * reach_tolerance(to, options.eps_reach_factor);
  auto flow = try_flow(model, from, control, fast);
  if (!flow) {
    out.control = control;
    out.error = kNoBall;
    return out;
  }
  Eigen::VectorXd theta = control.flatten();
  Eigen::VectorXd f = flow->terminal() - to;
  double err = f.norm();
  double mu = 1e-3;
  const auto d = f.size();
  for (int it = 0; it < options.max_iterations && err > target; ++it) {
    out.iterations = it + 1;
    const Eigen::MatrixXd jac = control_sensitivity(*flow, model);
    const Eigen::MatrixXd a = jac * jac.transpose();
    const double scale = a.trace() / static_cast<double>(d) + std::numeric_limits<double>::min();
    bool accepted = false;
    while (mu < 1e10) {
      const Eigen::MatrixXd damped = a + mu * scale * Eigen::MatrixXd::Identity(d, d);
      const Eigen::VectorXd step = -jac.transpose() * damped.ldlt().solve(f);
      control.assign(theta + step);
      auto trial = try_flow(model, from, control, fast);
      if (trial && trial->terminal().allFinite()) {
        const Eigen::VectorXd tf = trial->terminal() - to;
        if (tf.norm() < err) {
          theta += step;
          flow = std::move(trial);
          f = tf;
          err = tf.norm();
          mu = std::max(mu / 5.0, 1e-12);
          accepted = true;
          break;
        }
      }
      mu *= 4.0;
    }
    if (!accepted) break;
  }
  control.assign(theta);
  out.control = std::move(control);
  out.error = refined_error(model, from, to, out.control);
  out.success = out.error <= reach_tolerance(to, options.eps_reach_factor);
  return out;
}

Eigen::VectorXd random_controls(std::size_t n, double scale, std::uint64_t seed, int start) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(start)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
  return v;
}

}  // namespace

double reach_tolerance(const Eigen::VectorXd& to, double factor) { return factor * (1.0 + to.norm()); }

LegResult polish_control(const ModelSpec& model, const Eigen::VectorXd& from, const Eigen::VectorXd& to,
                         ControlPath control, const SynthesisOptions& options) {
  control.validate(model.r());
  return levenberg_marquardt(model, from, to, std::move(control), options);
}

Eigen::VectorXd terminal_gradient(const ModelSpec& model, const Eigen::VectorXd& from, const Eigen::VectorXd& to,
                                  const ControlPath& control, std::size_t steps) {
  const FlowResult flow = integrate_flow(model, from, control, kNoBall, FlowOptions{steps, false});
  return control_sensitivity(flow, model).transpose() * (flow.terminal() - to);
}

LegResult synthesize_leg(const ModelSpec& model, const Eigen::VectorXd& from, const Eigen::VectorXd& to,
                         double t_leg, std::size_t pieces, std::uint64_t seed, const SynthesisOptions& options) {
  if (!(t_leg > 0.0)) throw std::invalid_argument("synthesize_leg: t_leg must be positive");
  if (pieces < 2) throw std::invalid_argument("synthesize_leg: need at least 2 pieces");
  if (static_cast<std::size_t>(from.size()) != model.d || static_cast<std::size_t>(to.size()) != model.d)
    throw std::invalid_argument("synthesize_leg: wrong dimension");
  const Eigen::MatrixXd b = noise_matrix(model);
  const double eps = reach_tolerance(to, options.eps_reach_factor);
  ControlPath base = ControlPath::uniform(t_leg, pieces, model.r());

  if (model.r() > 0 && model.drift.is_zero() && numerical_rank(b) == model.d) {
    const Eigen::VectorXd u = b.completeOrthogonalDecomposition().solve((to - from) / t_leg);
    for (auto& v : base.values) v = u;
    LegResult out;
    out.control = base;
    out.error = refined_error(model, from, to, base);
    out.success = out.error <= eps;
    out.start = 0;
    out.iterations = 1;
    return out;
  }
  if (model.r() == 0) {
    LegResult out;
    out.control = base;
    out.error = refined_error(model, from, to, base);
    out.success = out.error <= eps;
    out.start = 0;
    return out;
  }

  LegResult first = levenberg_marquardt(model, from, to, base, options);
  first.start = 0;
  if (first.success || options.n_starts <= 1) return first;

  const double scale = (to - from).norm() / t_leg + 1.0;
  const int extra = options.n_starts - 1;
  std::vector<LegResult> results(static_cast<std::size_t>(extra));
#pragma omp parallel for schedule(dynamic) if (options.parallel)
  for (int s = 0; s < extra; ++s) {
    ControlPath c = base;
    c.assign(random_controls(pieces * model.r(), scale, seed, s + 1));
    results[static_cast<std::size_t>(s)] = levenberg_marquardt(model, from, to, c, options);
    results[static_cast<std::size_t>(s)].start = s + 1;
  }
  LegResult best = std::move(first);
  for (auto& r : results)
    if (r.error < best.error) best = std::move(r);  // strict: ties keep the lower start index
  return best;
}

std::string to_string(Verdict v) { return v == Verdict::kPositive ? "positive" : "inconclusive"; }

namespace {

struct TwistPlan {
  std::vector<Eigen::VectorXd> points;
  bool rank_ok = false;
};

// Waypoints in the nested slabs U_l: the even coordinates of w_l lie in
// (alpha_l lambda, alpha_{l+1} lambda) with alpha_l = sum_{k<=l} 2^-k.
TwistPlan plan_twists(const ModelSpec& model, const PositivityBasis& basis, const Eigen::VectorXd& from,
                      const Membership& m, int budget, std::uint64_t seed) {
  TwistPlan plan;
  const Eigen::MatrixXd y = basis.matrix();
  const auto d = static_cast<Eigen::Index>(basis.y.size());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.25, 0.25);
  double alpha = 0.0;
  for (int l = 0; l < budget; ++l) {
    const double next = alpha + std::ldexp(1.0, -(l + 1));
    const double width = next - alpha;
    Eigen::VectorXd c(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      // Odd coordinates follow the same schedule; any value is allowed there.
      c(i) = (0.5 * (alpha + next) + jitter(rng) * width) * m.coeffs(i);
    }
    plan.points.push_back(from + y * c);
    alpha = next;
    if (twist_rank_check(model, plan.points)) {
      plan.rank_ok = true;
      break;
    }
  }
  return plan;
}

struct LegSpec {
  Eigen::VectorXd from;
  Eigen::VectorXd to;
  double duration;
};

}  // namespace

ReachabilityCertificate certify(const ModelSpec& model, const PositivityBasis& basis, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& z, double t, const CertifyOptions& options) {
  if (!(t > 0.0)) throw std::invalid_argument("certify: t must be positive");
  if (static_cast<std::size_t>(x.size()) != model.d || static_cast<std::size_t>(z.size()) != model.d)
    throw std::invalid_argument("certify: wrong dimension");
  if (basis.y.size() != model.d) throw std::invalid_argument("certify: basis is not full-dimensional");

  ReachabilityCertificate cert;
  cert.model = model.name;
  cert.x = x;
  cert.z = z;
  cert.t = t;
  cert.eps_reach = reach_tolerance(z, options.synthesis.eps_reach_factor);
  cert.twist_budget = options.twist_budget;
  auto fail = [&](std::string stage, std::string reason) {
    cert.verdict = Verdict::kInconclusive;
    cert.stage = std::move(stage);
    cert.reason = std::move(reason);
    return cert;
  };

  // Stage 1: the membership hypotheses of the positivity criterion.
  std::optional<PositivityChain> chain;
  Membership first_hop;
  Eigen::VectorXd target = z;
  if (options.via_equilibrium) {
    std::vector<EquilibriumPoint> candidates;
    if (options.equilibrium) {
      const auto chk = is_equilibrium(model, *options.equilibrium);
      if (!chk.ok) return fail("equilibrium", "the given point is not an equilibrium of the control family");
      candidates.push_back({*options.equilibrium, chk.u, chk.residual});
    } else {
      Box box;
      if (options.equilibrium_box) {
        box = *options.equilibrium_box;
      } else {
        const Eigen::VectorXd lo = x.cwiseMin(z), hi = x.cwiseMax(z);
        const Eigen::VectorXd margin = ((hi - lo) * 0.5).cwiseMax(1.0);
        box = Box{lo - margin, hi + margin};
      }
      candidates = find_equilibria(model, box, options.equilibrium_starts, options.seed);
      if (candidates.empty()) return fail("equilibrium", "no equilibrium found in the search box");
    }
    chain = build_chain(model, basis, x, z, candidates);
    if (!chain) return fail("membership", "no equilibrium y with y in D(x) and z in D(y)");
    first_hop = chain->y_in_dx;
    target = chain->y;
  } else {
    first_hop = d_membership(basis, x, z);
    if (!first_hop.member) return fail("membership", "z is not in D(x)");
  }

  // Stage 2: twist waypoints and the time budget.
  const TwistPlan twists = plan_twists(model, basis, x, first_hop, options.twist_budget, options.seed);
  cert.twist_points = static_cast<int>(twists.points.size());
  cert.twist_rank_ok = twists.rank_ok;
  std::vector<Eigen::VectorXd> stops{x};
  stops.insert(stops.end(), twists.points.begin(), twists.points.end());
  stops.push_back(target);
  if (chain) stops.push_back(z);
  const std::size_t travel = stops.size() - 1;
  const double leg_time = chain ? t / (2.0 * static_cast<double>(travel)) : t / static_cast<double>(travel);
  const double dwell = t - leg_time * static_cast<double>(travel);

  // Stage 3: synthesize legs, inserting the dwell before the final leg of the equilibrium route.
  ControlPath total;
  double clock = 0.0;
  cert.waypoints.push_back({"start", x, 0.0, 0.0});
  for (std::size_t leg = 0; leg < travel; ++leg) {
    if (chain && leg + 1 == travel) {
      ControlPath hold = ControlPath::uniform(dwell, 2, model.r());
      for (auto& v : hold.values) v = chain->equilibrium.u;
      total = total.values.empty() ? hold : ControlPath::concat(total, hold);
      cert.waypoints.push_back({"dwell", chain->y, clock, clock + dwell});
      clock += dwell;
    }
    LegResult result;
    for (std::size_t pieces = options.pieces_per_leg; pieces <= options.max_pieces_per_leg; pieces *= 2) {
      result = synthesize_leg(model, stops[leg], stops[leg + 1], leg_time, pieces, options.seed + leg, options.synthesis);
      if (result.success) break;
    }
    if (!result.success)
      return fail("synthesis", "leg " + std::to_string(leg + 1) + " of " + std::to_string(travel) + " did not converge");
    total = total.values.empty() ? result.control : ControlPath::concat(total, result.control);
    clock += leg_time;
    std::string kind = "target";
    if (leg + 1 < travel) kind = (chain && leg + 2 == travel) ? "equilibrium" : "twist";
    cert.waypoints.push_back({kind, stops[leg + 1], clock, clock});
  }

  // Stage 4: polish the concatenated path from x, then evaluate the certificate quantities.
  LegResult polished = polish_control(model, x, z, total, options.synthesis);
  if (polished.error < refined_error(model, x, z, total)) total = polished.control;
  cert.control = total;
  auto flow = try_flow(model, x, total, FlowOptions{});
  if (!flow) return fail("flow", "the assembled control diverges");
  cert.flow_converged = flow->converged;
  cert.terminal_error = (flow->terminal() - z).norm();
  cert.ball_n = enclosing_ball(*flow);
  const GramianResult g = gramian(*flow, model);
  cert.gramian = g.m;
  cert.sigma_min = g.sigma_min;
  cert.eps_gram = g.eps_gram;
  cert.gramian_backward = g.used_backward;
  cert.k_rank = k_rank(*flow, model);
  cert.flow = std::move(flow);

  if (cert.terminal_error > cert.eps_reach) return fail("synthesis", "terminal error above tolerance");
  if (!cert.flow_converged) return fail("flow", "step halving did not converge");
  if (!g.conclusive) return fail("gramian", "Gramian is not finite");
  if (!(cert.sigma_min > 0.0) || cert.sigma_min < cert.eps_gram) return fail("gramian", "Gramian is numerically singular");
  if (cert.k_rank != model.d) return fail("k_rank", "bracket span along the path is not full rank");
  cert.verdict = Verdict::kPositive;
  return cert;
}

nlohmann::json ReachabilityCertificate::to_json() const {
  nlohmann::json j;
  j["model"] = model;
  j["x"] = vector_json(x);
  j["z"] = vector_json(z);
  j["t"] = t;
  auto wps = nlohmann::json::array();
  for (const auto& w : waypoints)
    wps.push_back({{"kind", w.kind}, {"point", vector_json(w.point)}, {"t_start", w.t_start}, {"t_end", w.t_end}});
  j["waypoints"] = wps;
  auto values = nlohmann::json::array();
  for (const auto& v : control.values) values.push_back(vector_json(v));
  j["control"] = {{"horizon", control.horizon}, {"breakpoints", control.breakpoints}, {"values", values}};
  j["terminal_error"] = terminal_error;
  j["eps_reach"] = eps_reach;
  j["sigma_min"] = sigma_min;
  j["eps_gram"] = eps_gram;
  j["gramian"] = matrix_json(gramian);
  j["K_rank"] = k_rank;
  j["ball_n"] = ball_n;
  j["verdict"] = to_string(verdict);
  if (verdict == Verdict::kInconclusive) {
    j["stage"] = stage;
    j["reason"] = reason;
  }
  j["twist"] = {{"points", twist_points}, {"budget", twist_budget}, {"rank_ok", twist_rank_ok}};
  j["gramian_backward"] = gramian_backward;
  j["flow_converged"] = flow_converged;
  return j;
}

void write_trajectory_csv(const FlowResult& flow, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "s";
  const auto d = flow.trajectory.front().size();
  for (Eigen::Index i = 0; i < d; ++i) out << ",phi_" << (i + 1);
  out << "\n" << std::setprecision(17);
  for (std::size_t n = 0; n < flow.times.size(); ++n) {
    out << flow.times[n];
    for (Eigen::Index i = 0; i < d; ++i) out << "," << flow.trajectory[n](i);
    out << "\n";
  }
}

}  // namespace hypocone
