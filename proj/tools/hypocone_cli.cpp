// hypocone: command-line front end (analyze, equilibria, reach, verify, bracket, models).
#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hypocone/closure.hpp"
#include "hypocone/equilibria.hpp"
#include "hypocone/montecarlo.hpp"
#include "hypocone/poly_json.hpp"
#include "hypocone/reach.hpp"
#include "hypocone/report.hpp"

using namespace hypocone;

namespace {

enum Exit { kOk = 0, kInternal = 1, kInput = 2, kUnmet = 3 };

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelArgs {
  std::string builtin;
  std::string path;
  std::vector<std::string> params;
};

struct Common {
  ModelArgs model;
  std::string out;
  std::uint64_t seed = 1;
};

void add_model_flags(CLI::App* cmd, Common& c) {
  auto* b = cmd->add_option("--builtin", c.model.builtin, "builtin model name (see `models list`)");
  auto* m = cmd->add_option("--model", c.model.path, "model JSON file");
  b->excludes(m);
  cmd->add_option("--param", c.model.params, "builtin parameter key=value (repeatable)");
  cmd->add_option("--out", c.out, "write the JSON report here");
}

ModelSpec load(const ModelArgs& a) {
  if (a.builtin.empty() == a.path.empty()) throw InputError("exactly one of --builtin or --model is required");
  if (!a.path.empty()) {
    if (!a.params.empty()) throw InputError("--param applies to builtin models only");
    return load_model(a.path);
  }
  std::map<std::string, std::string> params;
  for (const auto& kv : a.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("--param expects key=value, got '" + kv + "'");
    params[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return make_builtin(a.builtin, params);
}

Eigen::VectorXd vec_arg(const std::string& text, std::size_t d, const std::string& flag) {
  Eigen::VectorXd v;
  try {
    v = parse_vector(text);
  } catch (const std::invalid_argument& e) {
    throw InputError(flag + ": " + e.what());
  }
  if (static_cast<std::size_t>(v.size()) != d)
    throw InputError(flag + ": expected " + std::to_string(d) + " components, got " + std::to_string(v.size()));
  return v;
}

std::string fmt(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << ")";
  return os.str();
}

std::string fmt(const RationalVector& v) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << format_rational(v[i]);
  os << ")";
  return os.str();
}

void emit(Report& r, const Common& c, std::chrono::steady_clock::time_point start) {
  r.seed = c.seed;
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (c.out.empty()) return;
  std::ofstream f(c.out);
  if (!f) throw InputError("cannot write " + c.out);
  f << std::setw(2) << r.to_json() << "\n";
}

ClosureOptions closure_options(const ModelSpec& m, int max_rounds, bool slow, bool& capped) {
  ClosureOptions o;
  o.max_rounds = max_rounds;
  capped = false;
  // Large truncations run only the first induction step unless asked for the full fixpoint.
  if (!slow && m.d > 32 && max_rounds > 2) {
    o.max_rounds = 2;
    capped = true;
  }
  return o;
}

nlohmann::json cone_json(const ConeSpan& c, const std::optional<PositivityBasis>& basis, bool capped) {
  auto odd = nlohmann::json::array();
  for (const auto& f : c.odd_fields)
    odd.push_back({{"vector", to_json(f.value)}, {"parity", to_string(f.parity)}, {"derivation", f.derivation->to_string()}});
  auto even = nlohmann::json::array();
  for (std::size_t i = 0; i < c.even_generators.size(); ++i)
    even.push_back({{"vector", to_json(c.even_generators[i])},
                    {"derivation", c.even_fields[i].derivation->to_string()}});
  nlohmann::json j = {{"dim", c.dim},           {"rank", c.rank()},       {"full_dim", c.is_full_dim()},
                      {"exhausted", c.exhausted}, {"rounds", c.rounds},     {"rounds_capped", capped},
                      {"odd_basis", odd},       {"even_generators", even}};
  if (basis) {
    auto ys = nlohmann::json::array();
    for (const auto& y : basis->y) ys.push_back(to_json(y));
    j["basis"] = {{"k", basis->k}, {"y", ys}};
    j["k"] = basis->k;
  } else {
    j["basis"] = nullptr;
    j["k"] = c.odd_basis.size();
  }
  return j;
}

int cmd_analyze(const Common& c, int max_rounds, bool slow) {
  const auto start = std::chrono::steady_clock::now();
  const ModelSpec m = load(c.model);
  bool capped = false;
  const ConeSpan cone = compute_C(m, closure_options(m, max_rounds, slow, capped));
  const auto basis = choose_basis(cone);
  Report r = make_report("analyze", m);
  r.params = {{"max_rounds", max_rounds}, {"slow", slow}};
  r.result = cone_json(cone, basis, capped);
  std::cout << "model " << m.name << " (d=" << m.d << ", r=" << m.r() << ")\n";
  std::cout << "cone rank " << cone.rank() << " of " << m.d << (cone.exhausted ? ", fixpoint reached" : ", round limit hit")
            << " after " << cone.rounds << " rounds" << (capped ? " (capped; pass --slow for the full fixpoint)" : "") << "\n";
  std::cout << "odd basis:\n";
  for (const auto& f : cone.odd_fields) std::cout << "  " << fmt(f.value) << "  <- " << f.derivation->to_string() << "\n";
  std::cout << "even generators:\n";
  for (std::size_t i = 0; i < cone.even_generators.size(); ++i)
    std::cout << "  " << fmt(cone.even_generators[i]) << "  <- " << cone.even_fields[i].derivation->to_string() << "\n";
  if (basis)
    std::cout << "positivity basis: k=" << basis->k << "\n";
  else
    std::cout << "cone is not full-dimensional: no positivity basis\n";
  emit(r, c, start);
  return basis ? kOk : kUnmet;
}

Box box_arg(const std::string& text, std::size_t d) {
  Eigen::VectorXd v;
  try {
    v = parse_vector(text);
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("--box: ") + e.what());
  }
  if (static_cast<std::size_t>(v.size()) != 2 * d)
    throw InputError("--box: expected lo,hi pairs for " + std::to_string(d) + " coordinates");
  Box b{Eigen::VectorXd(d), Eigen::VectorXd(d)};
  for (std::size_t i = 0; i < d; ++i) {
    b.lo(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(2 * i));
    b.hi(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(2 * i + 1));
  }
  try {
    b.validate(d);
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("--box: ") + e.what());
  }
  return b;
}

int cmd_equilibria(const Common& c, const std::string& box_text, int starts) {
  const auto start = std::chrono::steady_clock::now();
  const ModelSpec m = load(c.model);
  if (starts < 1) throw InputError("--starts must be positive");
  const Box box = box_arg(box_text, m.d);
  const auto pts = find_equilibria(m, box, starts, c.seed);
  Report r = make_report("equilibria", m);
  r.params = {{"box", box_text}, {"starts", starts}};
  auto list = nlohmann::json::array();
  for (const auto& p : pts) list.push_back({{"y", vector_json(p.y)}, {"u", vector_json(p.u)}, {"residual", p.residual}});
  r.result = {{"equilibria", list}};
  std::cout << pts.size() << " equilibria found\n";
  for (const auto& p : pts) std::cout << "  y=" << fmt(p.y) << " u=" << fmt(p.u) << " residual=" << p.residual << "\n";
  emit(r, c, start);
  return kOk;
}

struct ReachArgs {
  std::string from, to, equilibrium, dump, box;
  double t = 1.0;
  bool via = false;
  std::size_t pieces = 8;
  int starts = 8;
  int max_rounds = 12;
};

int cmd_reach(const Common& c, const ReachArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  const ModelSpec m = load(c.model);
  const Eigen::VectorXd x = vec_arg(a.from, m.d, "--from");
  const Eigen::VectorXd z = vec_arg(a.to, m.d, "--to");
  if (!(a.t > 0.0)) throw InputError("--t must be positive");
  if (a.pieces < 2) throw InputError("--pieces must be at least 2");
  Report r = make_report("reach", m);
  r.params = {{"from", vector_json(x)}, {"to", vector_json(z)}, {"t", a.t}, {"via_equilibrium", a.via}, {"pieces", a.pieces}};
  bool capped = false;
  const ConeSpan cone = compute_C(m, closure_options(m, a.max_rounds, false, capped));
  const auto basis = choose_basis(cone);
  if (!basis) {
    r.result = {{"verdict", "inconclusive"}, {"stage", "cone"}, {"reason", "cone is not full-dimensional"}};
    std::cout << "verdict inconclusive (stage cone): the cone is not full-dimensional\n";
    emit(r, c, start);
    return kUnmet;
  }
  CertifyOptions o;
  o.via_equilibrium = a.via || !a.equilibrium.empty();
  if (!a.equilibrium.empty()) o.equilibrium = vec_arg(a.equilibrium, m.d, "--equilibrium");
  if (!a.box.empty()) o.equilibrium_box = box_arg(a.box, m.d);
  o.pieces_per_leg = a.pieces;
  o.max_pieces_per_leg = std::max(a.pieces, o.max_pieces_per_leg);
  o.seed = c.seed;
  o.synthesis.n_starts = a.starts;
  const auto cert = certify(m, *basis, x, z, a.t, o);
  r.result = cert.to_json();
  std::cout << "verdict " << to_string(cert.verdict);
  if (cert.verdict == Verdict::kInconclusive) std::cout << " (stage " << cert.stage << "): " << cert.reason;
  std::cout << "\n";
  if (cert.flow) {
    std::cout << "terminal error " << cert.terminal_error << " (tol " << cert.eps_reach << ")\n"
              << "sigma_min " << cert.sigma_min << " (eps_gram " << cert.eps_gram << "), K rank " << cert.k_rank
              << ", ball n=" << cert.ball_n << "\n";
    for (const auto& w : cert.waypoints)
      std::cout << "  " << std::setw(11) << std::left << w.kind << std::right << fmt(w.point) << " t=[" << w.t_start << ", "
                << w.t_end << "]\n";
    if (!a.dump.empty()) write_trajectory_csv(*cert.flow, a.dump);
  }
  emit(r, c, start);
  return cert.verdict == Verdict::kPositive ? kOk : kUnmet;
}

struct VerifyArgs {
  std::string from, to, heatmap, range;
  double t = 1.0, delta = 0.25, ball = 10.0, dt = 0.0;
  std::uint64_t paths = 100000;
  std::vector<std::size_t> coords{1, 2};
  std::size_t bins = 60;
};

int cmd_verify(const Common& c, const VerifyArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  const ModelSpec m = load(c.model);
  SimConfig cfg;
  cfg.t = a.t;
  cfg.dt = a.dt;
  cfg.n_ball = a.ball;
  cfg.n_paths = a.paths;
  cfg.seed = c.seed;
  cfg.delta = a.delta;
  cfg.z = vec_arg(a.to, m.d, "--to");
  const Eigen::VectorXd x = vec_arg(a.from, m.d, "--from");
  try {
    cfg.validate(m.d);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const auto ev = simulate(m, x, cfg);
  Report r = make_report("verify", m);
  r.params = {{"from", vector_json(x)}, {"to", vector_json(cfg.z)}, {"t", cfg.t}, {"dt", cfg.step()},
              {"paths", cfg.n_paths},   {"delta", cfg.delta},       {"ball", cfg.n_ball}};
  r.result = ev.to_json();
  std::cout << "hits " << ev.hits << " / " << ev.n_paths << ", stopped " << ev.stopped << ", lower 99% bound "
            << ev.lower_cb << "\n";
  if (ev.nonfinite > 0) std::cout << "warning: " << ev.nonfinite << " paths became non-finite inside the ball\n";
  if (!a.heatmap.empty()) {
    if (a.coords.size() != 2 || a.coords[0] < 1 || a.coords[1] < 1 || a.coords[0] > m.d || a.coords[1] > m.d)
      throw InputError("--heatmap-coords expects two 1-based coordinates");
    HeatmapGrid g;
    g.coord_a = a.coords[0] - 1;
    g.coord_b = a.coords[1] - 1;
    g.nx = g.ny = a.bins;
    if (!a.range.empty()) {
      const Eigen::VectorXd rg = vec_arg(a.range, 4, "--heatmap-range");
      g.lo_a = rg(0), g.hi_a = rg(1), g.lo_b = rg(2), g.hi_b = rg(3);
    }
    try {
      write_heatmap_csv(density_heatmap(m, x, cfg, g), g, a.heatmap);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  emit(r, c, start);
  return ev.lower_cb > 0.0 ? kOk : kUnmet;
}

int cmd_bracket(const Common& c, const std::string& expr) {
  const auto start = std::chrono::steady_clock::now();
  const ModelSpec m = load(c.model);
  PolyVectorField f = PolyVectorField::zero(m.d);
  try {
    f = evaluate_bracket_expression(m, expr);
  } catch (const ModelError& e) {
    throw InputError(e.what());
  }
  Report r = make_report("bracket", m);
  r.params = {{"expr", expr}};
  auto comps = nlohmann::json::array();
  std::cout << expr << " =\n";
  bool any = false;
  for (std::size_t i = 0; i < m.d; ++i) {
    const Polynomial& p = f[i];
    if (p.is_zero()) continue;
    any = true;
    const std::string label = m.coordinate_name(i);
    std::cout << "  d/d" << label << ": " << p.to_string() << "\n";
    comps.push_back({{"index", i + 1}, {"coordinate", label}, {"poly", p.to_string()}});
  }
  if (!any) std::cout << "  0\n";
  r.result = {{"expression", expr}, {"components", comps}, {"field", to_json(f)}, {"is_constant", f.is_constant()}};
  emit(r, c, start);
  return kOk;
}

int cmd_models_list(const std::string& out) {
  auto list = nlohmann::json::array();
  for (const auto& b : builtin_models()) {
    std::cout << b.name << "\n  " << b.summary << "\n  params: " << b.parameters << "\n";
    list.push_back({{"name", b.name}, {"summary", b.summary}, {"parameters", b.parameters}});
  }
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw InputError("cannot write " + out);
    f << std::setw(2) << nlohmann::json{{"command", "models list"}, {"version", library_version()}, {"result", list}} << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hypocone: positivity of transition densities for polynomial-drift SDEs"};
  app.set_version_flag("--version", library_version());
  app.require_subcommand(1);

  Common analyze_c, eq_c, reach_c, verify_c, bracket_c;
  int max_rounds = 12;
  bool slow = false;
  auto* analyze = app.add_subcommand("analyze", "compute the cone C and a positivity basis");
  add_model_flags(analyze, analyze_c);
  analyze->add_option("--max-rounds", max_rounds, "bracket rounds")->check(CLI::PositiveNumber);
  analyze->add_flag("--slow", slow, "run the full fixpoint on large truncations");

  std::string box;
  int starts = 64;
  auto* eq = app.add_subcommand("equilibria", "search for equilibria of the control family");
  add_model_flags(eq, eq_c);
  eq->add_option("--box", box, "lo1,hi1,lo2,hi2,...")->required();
  eq->add_option("--starts", starts, "number of multistart points");
  eq->add_option("--seed", eq_c.seed, "start-sequence offset");

  ReachArgs ra;
  auto* reach = app.add_subcommand("reach", "synthesize a steering control and certify positivity");
  add_model_flags(reach, reach_c);
  reach->add_option("--from", ra.from, "start point x, comma separated")->required();
  reach->add_option("--to", ra.to, "target point z, comma separated")->required();
  reach->add_option("--t", ra.t, "time horizon");
  reach->add_flag("--via-equilibrium", ra.via, "route through an equilibrium y with y in D(x), z in D(y)");
  reach->add_option("--equilibrium", ra.equilibrium, "explicit equilibrium y (implies --via-equilibrium)");
  reach->add_option("--box", ra.box, "equilibrium search box lo1,hi1,...");
  reach->add_option("--pieces", ra.pieces, "control pieces per leg");
  reach->add_option("--starts", ra.starts, "synthesis multistart budget");
  reach->add_option("--max-rounds", ra.max_rounds, "bracket rounds for the cone");
  reach->add_option("--dump-trajectory", ra.dump, "write (s, Phi_s) rows to this CSV");
  reach->add_option("--seed", reach_c.seed, "seed for waypoints and multistart");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Monte Carlo lower bound on P(x_t in B_delta(z))");
  add_model_flags(verify, verify_c);
  verify->add_option("--from", va.from, "start point x, comma separated")->required();
  verify->add_option("--to", va.to, "ball center z, comma separated")->required();
  verify->add_option("--t", va.t, "time horizon");
  verify->add_option("--paths", va.paths, "number of simulated paths");
  verify->add_option("--delta", va.delta, "radius of the ball around z");
  verify->add_option("--ball", va.ball, "stopping radius n");
  verify->add_option("--dt", va.dt, "Euler-Maruyama step (default t/4000)");
  verify->add_option("--seed", verify_c.seed, "64-bit seed");
  verify->add_option("--heatmap", va.heatmap, "write a 2-D endpoint histogram CSV");
  verify->add_option("--heatmap-coords", va.coords, "two 1-based coordinates")->expected(2);
  verify->add_option("--heatmap-range", va.range, "lo_a,hi_a,lo_b,hi_b");
  verify->add_option("--heatmap-bins", va.bins, "bins per axis");

  std::string expr;
  auto* bracket = app.add_subcommand("bracket", "evaluate a bracket expression");
  add_model_flags(bracket, bracket_c);
  bracket->add_option("--expr", expr, "e.g. \"[X1,X0]\" or \"ad^2(X1)(X0)\"")->required();

  std::string models_out;
  auto* models = app.add_subcommand("models", "builtin models");
  auto* list = models->add_subcommand("list", "list builtin models and parameters");
  list->add_option("--out", models_out);
  models->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(analyze_c, max_rounds, slow);
    if (eq->parsed()) return cmd_equilibria(eq_c, box, starts);
    if (reach->parsed()) return cmd_reach(reach_c, ra);
    if (verify->parsed()) return cmd_verify(verify_c, va);
    if (bracket->parsed()) return cmd_bracket(bracket_c, expr);
    if (list->parsed()) return cmd_models_list(models_out);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
