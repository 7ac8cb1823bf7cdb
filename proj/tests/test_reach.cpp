#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "hypocone/reach.hpp"
#include "support.hpp"

using namespace hypocone;
using testing_support::vec;

namespace {

// Terminal error of a control re-integrated on a grid twice as fine as the solver's.
double reintegrated_error(const ModelSpec& m, const Eigen::VectorXd& from, const Eigen::VectorXd& to,
                          const ControlPath& c) {
  FlowOptions fine;
  fine.refine = false;
  fine.min_steps = 8000;
  return (integrate_flow(m, from, c, 1e9, fine).terminal() - to).norm();
}

void check_certificate_invariants(const ModelSpec& m, const ReachabilityCertificate& cert) {
  if (cert.verdict != Verdict::kPositive) return;
  CHECK(cert.terminal_error <= cert.eps_reach);
  CHECK(cert.sigma_min >= cert.eps_gram);
  CHECK(cert.sigma_min > 0.0);
  CHECK(cert.k_rank == m.d);
  CHECK(cert.flow_converged);
  REQUIRE(cert.flow.has_value());
  CHECK(cert.flow->trajectory.front() == cert.x);
  CHECK(cert.flow->max_norm < cert.ball_n);
  CHECK(cert.control.horizon == doctest::Approx(cert.t));
  CHECK(reintegrated_error(m, cert.x, cert.z, cert.control) <= cert.eps_reach);
}

}  // namespace

TEST_CASE("elliptic shortcut: constant control (to - from) / t") {
  ModelSpec m;
  m.name = "brownian";
  m.d = 2;
  m.drift = PolyVectorField::zero(2);
  m.noise = {{1, 0}, {0, 1}};
  m.noise_labels = {"X1", "X2"};
  const auto leg = synthesize_leg(m, vec({1, 2}), vec({3, -2}), 2.0, 4, 1);
  REQUIRE(leg.success);
  CHECK(leg.iterations <= 1);
  for (const auto& v : leg.control.values) CHECK((v - vec({1, -2})).norm() < 1e-12);
  CHECK(leg.error < 1e-12);
}

TEST_CASE("synthesize_leg examples reach the target on independent re-integration") {
  SUBCASE("Langevin quartic (0,0) -> (1,0)") {
    const auto m = make_builtin("langevin", {{"d", "1"}});
    const auto leg = synthesize_leg(m, vec({0, 0}), vec({1, 0}), 1.0, 8, 1);
    REQUIRE(leg.success);
    CHECK(leg.error < 1e-5);
    CHECK(reintegrated_error(m, vec({0, 0}), vec({1, 0}), leg.control) < 1e-5);
  }
  SUBCASE("BHW (0,0) -> (1,1)") {
    const auto m = bhw(0, 0, 1, 2, 1);
    const auto leg = synthesize_leg(m, vec({0, 0}), vec({1, 1}), 1.0, 8, 1);
    REQUIRE(leg.success);
    CHECK(leg.error < 1e-5);
    CHECK(reintegrated_error(m, vec({0, 0}), vec({1, 1}), leg.control) < 1e-5);
  }
}

TEST_CASE("synthesize_leg is deterministic and serial equals parallel") {
  const auto m = bhw(0, 0, 1, 2, 1);
  SynthesisOptions serial;
  serial.parallel = false;
  const auto a = synthesize_leg(m, vec({0, 0}), vec({1, 0.5}), 1.0, 6, 9);
  const auto b = synthesize_leg(m, vec({0, 0}), vec({1, 0.5}), 1.0, 6, 9);
  const auto c = synthesize_leg(m, vec({0, 0}), vec({1, 0.5}), 1.0, 6, 9, serial);
  CHECK(a.control.flatten() == b.control.flatten());
  CHECK(a.control.flatten() == c.control.flatten());
  CHECK(a.start == c.start);
}

TEST_CASE("terminal gradient matches central finite differences") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (const auto& m : {make_builtin("langevin", {{"d", "1"}}), make_builtin("bhw", {{"a1", "1"}}), nonexample3d()}) {
    for (int trial = 0; trial < 4; ++trial) {
      auto c = ControlPath::uniform(1.0, 3, m.r());
      Eigen::VectorXd flat(static_cast<Eigen::Index>(3 * m.r()));
      for (auto& v : flat) v = 0.7 * g(rng);
      c.assign(flat);
      const Eigen::VectorXd from = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m.d), 0.1);
      const Eigen::VectorXd to = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m.d), 0.5);
      const auto grad = terminal_gradient(m, from, to, c, 4000);
      FlowOptions fixed;
      fixed.refine = false;
      fixed.min_steps = 4000;
      auto objective = [&](const Eigen::VectorXd& v) {
        c.assign(v);
        return 0.5 * (integrate_flow(m, from, c, 1e9, fixed).terminal() - to).squaredNorm();
      };
      Eigen::VectorXd fd(flat.size());
      for (Eigen::Index k = 0; k < flat.size(); ++k) {
        Eigen::VectorXd p = flat, q = flat;
        p[k] += 1e-5;
        q[k] -= 1e-5;
        fd[k] = (objective(p) - objective(q)) / 2e-5;
      }
      CHECK((grad - fd).norm() <= 1e-4 * std::max(fd.norm(), 1e-8));
    }
  }
}

TEST_CASE("certify: Langevin is positive for arbitrary targets") {
  const auto m = make_builtin("langevin", {{"d", "1"}});
  const auto basis = *choose_basis(compute_C(m));
  const auto cert = certify(m, basis, vec({0, 0}), vec({1, 0}), 1.0);
  CHECK(cert.verdict == Verdict::kPositive);
  CHECK(cert.terminal_error < 1e-5);
  check_certificate_invariants(m, cert);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto m2 = make_builtin("langevin", {{"d", "2"}});
  const auto b2 = *choose_basis(compute_C(m2));
  for (int i = 0; i < 3; ++i) {
    const auto c = certify(m2, b2, Eigen::VectorXd::Zero(4), vec({u(rng), u(rng), u(rng), u(rng)}), 1.0);
    CHECK(c.verdict == Verdict::kPositive);
    check_certificate_invariants(m2, c);
  }
}

TEST_CASE("certify: BHW") {
  const auto m = make_builtin("bhw", {});
  const auto basis = *choose_basis(compute_C(m));
  SUBCASE("(0,0) -> (2,1) through the equilibrium (1,1)") {
    CertifyOptions opt;
    opt.via_equilibrium = true;
    opt.equilibrium = vec({1, 1});
    const auto cert = certify(m, basis, vec({0, 0}), vec({2, 1}), 1.0, opt);
    CHECK(cert.verdict == Verdict::kPositive);
    check_certificate_invariants(m, cert);
    bool dwell = false;
    for (const auto& w : cert.waypoints) dwell |= w.kind == "dwell";
    CHECK(dwell);
  }
  SUBCASE("(0,0) -> (2,1) directly") {
    const auto cert = certify(m, basis, vec({0, 0}), vec({2, 1}), 1.0);
    CHECK(cert.verdict == Verdict::kPositive);
    check_certificate_invariants(m, cert);
  }
  SUBCASE("(0,0) -> (-1,0) is outside D(x): inconclusive at membership") {
    const auto cert = certify(m, basis, vec({0, 0}), vec({-1, 0}), 1.0);
    CHECK(cert.verdict == Verdict::kInconclusive);
    CHECK(cert.stage == "membership");
  }
  SUBCASE("an explicit point that is not an equilibrium is rejected") {
    CertifyOptions opt;
    opt.via_equilibrium = true;
    opt.equilibrium = vec({1, 0});
    const auto cert = certify(m, basis, vec({0, 0}), vec({2, 1}), 1.0, opt);
    CHECK(cert.verdict == Verdict::kInconclusive);
    CHECK(cert.stage == "equilibrium");
  }
}

TEST_CASE("certificate JSON and trajectory CSV") {
  const auto m = make_builtin("langevin", {{"d", "1"}});
  const auto basis = *choose_basis(compute_C(m));
  const auto cert = certify(m, basis, vec({0, 0}), vec({1, 0}), 1.0);
  const auto j = cert.to_json();
  for (const char* key : {"model", "x", "z", "t", "waypoints", "control", "terminal_error", "eps_reach", "sigma_min",
                          "eps_gram", "gramian", "K_rank", "ball_n", "verdict", "twist"})
    CHECK(j.contains(key));
  CHECK(j["verdict"] == "positive");
  CHECK(j["K_rank"] == 2);
  CHECK(j["twist"].contains("budget"));
  REQUIRE(cert.flow.has_value());
  const auto path = (std::filesystem::temp_directory_path() / "hypocone_traj.csv").string();
  write_trajectory_csv(*cert.flow, path);
  std::ifstream in(path);
  std::string header, line;
  std::getline(in, header);
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  std::filesystem::remove(path);
  CHECK(header.rfind("s,", 0) == 0);
  CHECK(rows == cert.flow->times.size());
}
