// One PASS/FAIL line per acceptance criterion; tolerances and time limits are pinned here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include <boost/math/distributions/non_central_chi_squared.hpp>

#include "burgers_oracle.hpp"
#include "hypocone/closure.hpp"
#include "hypocone/equilibria.hpp"
#include "hypocone/flow.hpp"
#include "hypocone/model.hpp"
#include "hypocone/montecarlo.hpp"
#include "hypocone/reach.hpp"
#include "support.hpp"

using namespace hypocone;
using testing_support::unit;
using testing_support::vec;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.require(secs < limit_s, "time limit " + std::to_string(limit_s) + " s exceeded");
  if (!out.ok) ++failures;
  std::printf("criterion %d: %s  %s  (%.2f s, limit %.0f s)%s%s\n", id, out.ok ? "PASS" : "FAIL", title, secs, limit_s,
              out.detail.empty() ? "" : "  ", out.detail.c_str());
  std::fflush(stdout);
}

ModelSpec brownian(std::size_t d) {
  ModelSpec m;
  m.name = "brownian";
  m.d = d;
  m.drift = PolyVectorField::zero(d);
  for (std::size_t i = 0; i < d; ++i) {
    m.noise.push_back(unit(d, i));
    m.noise_labels.push_back("X" + std::to_string(i + 1));
  }
  return m;
}

ControlPath random_control(std::mt19937_64& rng, double t, std::size_t pieces, std::size_t r, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  auto c = ControlPath::uniform(t, pieces, r);
  for (auto& v : c.values)
    for (auto& x : v) x = g(rng);
  return c;
}

bool in_span(const std::vector<RationalVector>& basis, const RationalVector& v) {
  RationalSpan s(v.size());
  for (const auto& b : basis) s.insert(b);
  return is_zero_vector(s.residual(v));
}

void bracket_golden(Outcome& out) {
  for (const char* gamma : {"1", "3/2"}) {
    for (int d : {1, 2}) {
      const auto m = make_builtin("langevin", {{"d", std::to_string(d)}, {"gamma", gamma}});
      for (int j = 0; j < d; ++j) {
        RationalVector want(2 * d, Rational(0));
        want[j] = -parse_rational(gamma);
        want[d + j] = 1;
        out.require(lie_bracket(PolyVectorField::constant(m.noise[j]), m.drift) == PolyVectorField::constant(want),
                    "Langevin [X_j, X0]");
      }
    }
  }
  const auto b = make_builtin("bhw", {});
  out.require(ad_power(PolyVectorField::constant(b.noise[0]), b.drift, 2) == PolyVectorField::constant({2, 0}),
              "BHW ad^2 X1(X0)");
  const auto burgers = make_builtin("burgers", {});
  for (const auto& [j, m] : burgers_oracle::sampled_pairs())
    for (const auto& c : burgers_oracle::second_brackets(2, j, m))
      out.require(evaluate_bracket_expression(burgers, c.expression) == PolyVectorField::constant(c.expected),
                  c.expression);
}

void closure_golden(Outcome& out) {
  for (int d : {1, 2}) {
    const auto c = compute_C(make_builtin("langevin", {{"d", std::to_string(d)}}));
    out.require(c.rank() == static_cast<std::size_t>(2 * d) && c.odd_basis.size() == static_cast<std::size_t>(2 * d) &&
                    c.even_generators.empty(),
                "Langevin d=" + std::to_string(d));
  }
  const auto b = compute_C(make_builtin("bhw", {}));
  out.require(b.odd_basis == std::vector<RationalVector>{{0, 1}} && b.even_generators == std::vector<RationalVector>{{1, 0}},
              "BHW cone");
  const auto n = compute_C(nonexample3d());
  out.require(n.odd_basis == std::vector<RationalVector>{unit(3, 0)} &&
                  n.even_generators == std::vector<RationalVector>{unit(3, 1)} && n.rank() == 2,
              "nonexample3d cone");
  out.require(!choose_basis(n).has_value(), "nonexample3d basis must fail");
}

void burgers_closure(Outcome& out) {
  const auto m = make_builtin("burgers", {{"N", "2"}, {"forcing", "low"}});
  ClosureOptions opt;
  opt.max_rounds = 2;
  const auto c = compute_C(m, opt);
  int found = 0;
  for (const auto& k : burgers_modes(1)) {
    for (int slot : {2, 3}) {
      const bool ok = in_span(c.odd_basis, burgers_oracle::field(2, k, slot));
      out.require(ok, burgers_oracle::label(slot == 2 ? "Xt" : "Yt", k) + " not in the odd span");
      found += ok;
    }
  }
  out.detail = std::to_string(found) + "/16 compressible fields odd";
  if (found != 16) out.ok = false;
}

void gramian_oracle(Outcome& out) {
  const auto m = make_builtin("langevin", {{"d", "1"}, {"gamma", "0"}, {"potential", "zero"}});
  const auto f = integrate_flow(m, vec({0, 0}), ControlPath::uniform(1.0, 2, 1), 10);
  const auto g = gramian(f, m);
  Eigen::Matrix2d want;
  want << 1, 0.5, 0.5, 1.0 / 3.0;
  out.require((g.m - want).cwiseAbs().maxCoeff() < 1e-7, "M entries");
  out.require(std::abs(g.m.determinant() - 1.0 / 12.0) < 1e-7, "det M");
}

void rank_implies_invertible(Outcome& out) {
  const std::vector<ModelSpec> models = {make_builtin("langevin", {{"d", "1"}}), make_builtin("langevin", {{"d", "2"}}),
                                         make_builtin("bhw", {}), make_builtin("bhw", {{"a1", "1"}, {"a2", "1/2"}}),
                                         nonexample3d()};
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  int violations = 0, full = 0;
  for (int i = 0; i < 50; ++i) {
    const auto& m = models[static_cast<std::size_t>(i) % models.size()];
    Eigen::VectorXd x(static_cast<Eigen::Index>(m.d));
    for (auto& v : x) v = 0.5 * g(rng);
    const auto f = integrate_flow(m, x, random_control(rng, 1.0, 4, m.r(), 1.0), 1e9);
    const auto gr = gramian(f, m);
    if (k_rank(f, m) == m.d) {
      ++full;
      if (!(gr.sigma_min > gr.eps_gram)) ++violations;
    }
  }
  out.detail = std::to_string(full) + " full-rank flows, " + std::to_string(violations) + " violations";
  if (violations != 0) out.ok = false;
}

void reach_cases(Outcome& out) {
  const auto l = make_builtin("langevin", {{"d", "1"}});
  const auto c1 = certify(l, *choose_basis(compute_C(l)), vec({0, 0}), vec({1, 0}), 1.0);
  out.require(c1.verdict == Verdict::kPositive && c1.terminal_error < 1e-5 && c1.sigma_min > c1.eps_gram,
              "(i) Langevin");
  const auto b = make_builtin("bhw", {});
  const auto basis = *choose_basis(compute_C(b));
  CertifyOptions opt;
  opt.via_equilibrium = true;
  opt.equilibrium = vec({1, 1});
  const auto c2 = certify(b, basis, vec({0, 0}), vec({2, 1}), 1.0, opt);
  out.require(c2.verdict == Verdict::kPositive && c2.terminal_error < 1e-5 && c2.sigma_min > c2.eps_gram,
              "(ii) BHW via (1,1)");
  const auto c3 = certify(b, basis, vec({0, 0}), vec({-1, 0}), 1.0);
  out.require(c3.verdict == Verdict::kInconclusive && c3.stage == "membership", "(iii) BHW (-1,0)");
  char buf[160];
  std::snprintf(buf, sizeof buf, "errors %.1e, %.1e; sigma_min %.3g, %.3g", c1.terminal_error, c2.terminal_error,
                c1.sigma_min, c2.sigma_min);
  if (out.ok) out.detail = buf;
}

void monte_carlo(Outcome& out) {
  SimConfig c;
  c.t = 1.0;
  c.n_paths = 100000;
  c.delta = 0.25;
  c.n_ball = 10;
  c.seed = 7;
  c.z = vec({1, 0});
  const auto ev = simulate(make_builtin("langevin", {{"d", "1"}}), vec({0, 0}), c);
  out.require(ev.lower_cb > 0.0, "Langevin lower_cb");
  SimConfig g;
  g.t = 1.0;
  g.dt = 0.01;
  g.n_paths = 100000;
  g.delta = 0.4;
  g.n_ball = 50;
  g.seed = 7;
  g.z = vec({0.5, 0.3});
  const auto eg = simulate(brownian(2), vec({0, 0}), g);
  const boost::math::non_central_chi_squared dist(2.0, g.z.squaredNorm());
  const double p = boost::math::cdf(dist, g.delta * g.delta);
  const double se = std::sqrt(p * (1 - p) / static_cast<double>(g.n_paths));
  out.require(std::abs(eg.hit_fraction() - p) <= 3 * se, "Gaussian ball mass");
  char buf[160];
  std::snprintf(buf, sizeof buf, "lower_cb %.4g; Gaussian %.4f vs %.4f (se %.1e)", ev.lower_cb, eg.hit_fraction(), p, se);
  if (out.ok) out.detail = buf;
}

void properties(Outcome& out) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 20; ++i) {
    const auto u = testing_support::random_field(rng, 3, 3, 4);
    const auto v = testing_support::random_field(rng, 3, 3, 4);
    const auto w = testing_support::random_field(rng, 3, 3, 4);
    out.require(lie_bracket(u, v) == lie_bracket(v, u) * Rational(-1), "antisymmetry");
    out.require((lie_bracket(u, lie_bracket(v, w)) + lie_bracket(v, lie_bracket(w, u)) +
                 lie_bracket(w, lie_bracket(u, v))).is_zero(),
                "Jacobi");
    const Rational a = testing_support::small_rational(rng);
    out.require(lie_bracket(u * a + v, w) == lie_bracket(u, w) * a + lie_bracket(v, w), "bilinearity");
  }
  const std::vector<ModelSpec> models = {make_builtin("langevin", {{"d", "1"}}), make_builtin("bhw", {{"a1", "1"}}),
                                         nonexample3d()};
  for (int i = 0; i < 9; ++i) {
    const auto& m = models[static_cast<std::size_t>(i) % models.size()];
    const auto c = random_control(rng, 1.0, 4, m.r(), 1.0);
    const auto f = integrate_flow(m, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.d)), c, 1e9);
    const auto g = gramian(f, m);
    out.require((g.m - g.m.transpose()).norm() <= 1e-10 * g.m.norm(), "Gramian symmetry");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.m);
    out.require(es.eigenvalues().minCoeff() >= -1e-10 * g.m.trace(), "Gramian PSD");
    ControlPath tail;
    tail.horizon = 0.5;
    tail.breakpoints = {0.0, 0.25, 0.5};
    tail.values = {c.values[2], c.values[3]};
    std::size_t mid = 0;
    while (f.times[mid] < 0.5 - 1e-12) ++mid;
    const auto h = integrate_flow(m, f.trajectory[mid], tail, 1e9);
    const Eigen::MatrixXd lhs = h.j0s.back() * f.j0s[mid];
    out.require((lhs - f.j0s.back()).norm() <= 1e-7 * std::max(1.0, f.j0s.back().norm()), "cocycle");
  }
  for (int i = 0; i < 10; ++i) {
    const auto& m = models[static_cast<std::size_t>(i) % models.size()];
    auto c = random_control(rng, 1.0, 3, m.r(), 0.7);
    const Eigen::VectorXd from = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m.d), 0.1);
    const Eigen::VectorXd to = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m.d), 0.5);
    const auto grad = terminal_gradient(m, from, to, c, 4000);
    FlowOptions fixed;
    fixed.refine = false;
    fixed.min_steps = 4000;
    const Eigen::VectorXd base = c.flatten();
    Eigen::VectorXd fd(base.size());
    for (Eigen::Index k = 0; k < base.size(); ++k) {
      double val[2];
      for (int s = 0; s < 2; ++s) {
        Eigen::VectorXd p = base;
        p[k] += s == 0 ? 1e-5 : -1e-5;
        c.assign(p);
        val[s] = 0.5 * (integrate_flow(m, from, c, 1e9, fixed).terminal() - to).squaredNorm();
      }
      fd[k] = (val[0] - val[1]) / 2e-5;
    }
    out.require((grad - fd).norm() <= 1e-4 * std::max(fd.norm(), 1e-8), "variational gradient");
  }
  SimConfig s;
  s.n_paths = 5000;
  s.dt = 1.0 / 1000;
  s.seed = 123;
  s.z = vec({1, 0});
  const auto l = make_builtin("langevin", {{"d", "1"}});
  out.require(simulate(l, vec({0, 0}), s) == simulate(l, vec({0, 0}), s), "MC seed determinism");
  out.require(simulate(l, vec({0, 0}), s) == simulate_serial(l, vec({0, 0}), s), "MC serial vs parallel");
}

}  // namespace

int main() {
  criterion(1, "bracket golden vectors", 10, bracket_golden);
  criterion(2, "closure golden sets", 30, closure_golden);
  criterion(3, "Burgers N=2 low forcing closure", 300, burgers_closure);
  criterion(4, "Gramian oracle", 1, gramian_oracle);
  criterion(5, "rank d implies invertible Gramian on 50 flows", 120, rank_implies_invertible);
  criterion(6, "reach cases", 120, reach_cases);
  criterion(7, "Monte Carlo corroboration", 120, monte_carlo);
  criterion(8, "property suites", 180, properties);
  std::printf("%d criterion failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
