#include "hypocone/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hypocone/closure.hpp"
#include "hypocone/compiled_field.hpp"

namespace hypocone {

void ControlPath::validate(std::size_t r) const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("control: horizon must be positive");
  if (values.empty()) throw std::invalid_argument("control: no pieces");
  if (breakpoints.size() != values.size() + 1) throw std::invalid_argument("control: breakpoints/values size mismatch");
  if (breakpoints.front() != 0.0 || std::abs(breakpoints.back() - horizon) > 1e-12 * horizon)
    throw std::invalid_argument("control: breakpoints must span [0, horizon]");
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
    if (!(breakpoints[i + 1] > breakpoints[i])) throw std::invalid_argument("control: breakpoints must increase");
  for (const auto& v : values) {
    if (static_cast<std::size_t>(v.size()) != r) throw std::invalid_argument("control: value length differs from r");
    if (!v.allFinite()) throw std::invalid_argument("control: non-finite value");
  }
}

ControlPath ControlPath::uniform(double horizon, std::size_t pieces, std::size_t r) {
  ControlPath c;
  c.horizon = horizon;
  for (std::size_t i = 0; i <= pieces; ++i) c.breakpoints.push_back(horizon * static_cast<double>(i) / static_cast<double>(pieces));
  c.breakpoints.back() = horizon;
  c.values.assign(pieces, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(r)));
  return c;
}

Eigen::VectorXd ControlPath::flatten() const {
  const Eigen::Index r = values.empty() ? 0 : values.front().size();
  Eigen::VectorXd out(r * static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) out.segment(static_cast<Eigen::Index>(i) * r, r) = values[i];
  return out;
}

void ControlPath::assign(const Eigen::VectorXd& flat) {
  const Eigen::Index r = values.empty() ? 0 : values.front().size();
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = flat.segment(static_cast<Eigen::Index>(i) * r, r);
}

ControlPath ControlPath::concat(const ControlPath& a, const ControlPath& b) {
  ControlPath c = a;
  for (std::size_t i = 1; i < b.breakpoints.size(); ++i) c.breakpoints.push_back(a.horizon + b.breakpoints[i]);
  c.values.insert(c.values.end(), b.values.begin(), b.values.end());
  c.horizon = a.horizon + b.horizon;
  c.breakpoints.back() = c.horizon;
  return c;
}

Eigen::MatrixXd noise_matrix(const ModelSpec& model) {
  Eigen::MatrixXd b(static_cast<Eigen::Index>(model.d), static_cast<Eigen::Index>(model.r()));
  for (std::size_t j = 0; j < model.r(); ++j) b.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(to_doubles(model.noise[j]).data(), static_cast<Eigen::Index>(model.d));
  return b;
}

namespace {

double condition_number(const Eigen::MatrixXd& j) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
  const auto& s = svd.singularValues();
  const double lo = s(s.size() - 1);
  return lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

std::string divergence_message(double t) {
  std::ostringstream os;
  os << "flow diverged (non-finite state) at t = " << t;
  return os.str();
}

FlowResult integrate_once(const CompiledField& x0, const Eigen::MatrixXd& b, const Eigen::VectorXd& x,
                          const ControlPath& control, double n_ball, std::size_t min_steps, int factor) {
  const auto d = x.size();
  FlowResult out;
  Eigen::VectorXd y = x;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(d, d);
  out.times.push_back(0.0);
  out.trajectory.push_back(y);
  out.j0s.push_back(jac);
  out.max_norm = y.norm();
  const bool check_every = d <= 8;
  std::size_t since_cond = 0;

  auto record = [&](double t) {
    if (!y.allFinite() || !jac.allFinite()) throw DivergenceError(t, divergence_message(t));
    out.times.push_back(t);
    out.trajectory.push_back(y);
    out.j0s.push_back(jac);
    const double nrm = y.norm();
    out.max_norm = std::max(out.max_norm, nrm);
    if (!out.exited && nrm >= n_ball) {
      out.exited = true;
      out.exit_time = t;
    }
    if (check_every || ++since_cond >= 64) {
      since_cond = 0;
      out.cond_j = std::max(out.cond_j, condition_number(jac));
    }
  };

  for (std::size_t p = 0; p < control.pieces(); ++p) {
    const double a = control.breakpoints[p];
    const double len = control.breakpoints[p + 1] - a;
    auto m = static_cast<std::size_t>(std::ceil(static_cast<double>(min_steps) * len / control.horizon));
    m = std::max<std::size_t>(2, m + (m % 2)) * static_cast<std::size_t>(factor);
    const double h = len / static_cast<double>(m);
    const Eigen::VectorXd push = b * control.values[p];
    FlowSegment seg;
    seg.first = out.times.size() - 1;
    seg.piece = p;
    auto f = [&](const Eigen::VectorXd& s) { return Eigen::VectorXd(x0(s) + push); };
    for (std::size_t i = 0; i < m; ++i) {
      const Eigen::VectorXd k1 = f(y);
      const Eigen::MatrixXd a1 = x0.jacobian(y) * jac;
      const Eigen::VectorXd y2 = y + 0.5 * h * k1;
      const Eigen::MatrixXd j2 = jac + 0.5 * h * a1;
      const Eigen::VectorXd k2 = f(y2);
      const Eigen::MatrixXd a2 = x0.jacobian(y2) * j2;
      const Eigen::VectorXd y3 = y + 0.5 * h * k2;
      const Eigen::MatrixXd j3 = jac + 0.5 * h * a2;
      const Eigen::VectorXd k3 = f(y3);
      const Eigen::MatrixXd a3 = x0.jacobian(y3) * j3;
      const Eigen::VectorXd y4 = y + h * k3;
      const Eigen::MatrixXd j4 = jac + h * a3;
      const Eigen::VectorXd k4 = f(y4);
      const Eigen::MatrixXd a4 = x0.jacobian(y4) * j4;
      y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      jac += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
      const double t = (i + 1 == m) ? control.breakpoints[p + 1] : a + h * static_cast<double>(i + 1);
      record(t);
    }
    seg.last = out.times.size() - 1;
    out.segments.push_back(seg);
    out.segment_controls.push_back(control.values[p]);
    out.steps += m;
  }
  if (!check_every) out.cond_j = std::max(out.cond_j, condition_number(jac));
  return out;
}

}  // namespace

FlowResult integrate_flow(const ModelSpec& model, const Eigen::VectorXd& x, const ControlPath& control,
                          double n_ball, const FlowOptions& options) {
  if (static_cast<std::size_t>(x.size()) != model.d) throw std::invalid_argument("integrate_flow: start point has wrong dimension");
  control.validate(model.r());
  const CompiledField x0(model.drift);
  const Eigen::MatrixXd b = noise_matrix(model);
  FlowResult coarse = integrate_once(x0, b, x, control, n_ball, options.min_steps, 1);
  if (!options.refine) return coarse;
  int factor = 1;
  for (int k = 0; k < options.max_halvings; ++k) {
    factor *= 2;
    FlowResult fine = integrate_once(x0, b, x, control, n_ball, options.min_steps, factor);
    const double change = (fine.terminal() - coarse.terminal()).norm();
    fine.refinement_change = change;
    if (change <= options.refine_tol * std::max(1.0, fine.terminal().norm())) {
      fine.converged = true;
      return fine;
    }
    coarse = std::move(fine);
  }
  coarse.converged = false;
  return coarse;
}

std::vector<Eigen::MatrixXd> transition_to_end(const FlowResult& flow) {
  const Eigen::MatrixXd& jt = flow.j0s.back();
  std::vector<Eigen::MatrixXd> out;
  out.reserve(flow.j0s.size());
  for (const auto& js : flow.j0s) out.push_back(js.transpose().partialPivLu().solve(jt.transpose()).transpose());
  return out;
}

namespace {

// Composite Simpson weights for a uniformly spaced segment with an even number of steps.
double simpson_weight(std::size_t i, std::size_t first, std::size_t last, double h) {
  if (i == first || i == last) return h / 3.0;
  return ((i - first) % 2 == 1) ? 4.0 * h / 3.0 : 2.0 * h / 3.0;
}

GramianResult finish(Eigen::MatrixXd m, std::size_t d) {
  GramianResult g;
  m = 0.5 * (m + m.transpose());
  g.m = m;
  g.eps_gram = 1e-8 * m.trace() / static_cast<double>(d);
  if (!m.allFinite()) {
    g.conclusive = false;
    return g;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  g.sigma_min = svd.singularValues()(svd.singularValues().size() - 1);
  return g;
}

GramianResult accumulate(const FlowResult& flow, const Eigen::MatrixXd& b, const std::vector<Eigen::MatrixXd>& kst) {
  const auto d = b.rows();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  const Eigen::MatrixXd bbt = b * b.transpose();
  for (const auto& seg : flow.segments) {
    const double h = (flow.times[seg.last] - flow.times[seg.first]) / static_cast<double>(seg.last - seg.first);
    for (std::size_t i = seg.first; i <= seg.last; ++i)
      m += simpson_weight(i, seg.first, seg.last, h) * kst[i] * bbt * kst[i].transpose();
  }
  return finish(m, static_cast<std::size_t>(d));
}

}  // namespace

GramianResult gramian(const FlowResult& flow, const ModelSpec& model) {
  if (flow.cond_j > kCondFallback) return gramian_backward(flow, model);
  const Eigen::MatrixXd b = noise_matrix(model);
  return accumulate(flow, b, transition_to_end(flow));
}

GramianResult gramian_backward(const FlowResult& flow, const ModelSpec& model) {
  const CompiledField x0(model.drift);
  const Eigen::MatrixXd b = noise_matrix(model);
  const auto d = static_cast<Eigen::Index>(model.d);
  std::vector<Eigen::MatrixXd> kst(flow.times.size());
  Eigen::MatrixXd k = Eigen::MatrixXd::Identity(d, d);
  kst.back() = k;
  // Segments tile the nodes; walk them from the end so the control at each step is known.
  for (auto seg = flow.segments.rbegin(); seg != flow.segments.rend(); ++seg) {
    const Eigen::VectorXd push = b * flow.segment_controls[seg->piece];
    for (std::size_t i = seg->last; i > seg->first; --i) {
      const double h = flow.times[i] - flow.times[i - 1];
      const Eigen::VectorXd& p1 = flow.trajectory[i - 1];
      const Eigen::VectorXd& p2 = flow.trajectory[i];
      const Eigen::VectorXd f1 = x0(p1) + push;
      const Eigen::VectorXd f2 = x0(p2) + push;
      // Cubic Hermite midpoint of the stored trajectory.
      const Eigen::VectorXd mid = 0.5 * (p1 + p2) + h / 8.0 * (f1 - f2);
      const Eigen::MatrixXd a_end = x0.jacobian(p2);
      const Eigen::MatrixXd a_mid = x0.jacobian(mid);
      const Eigen::MatrixXd a_start = x0.jacobian(p1);
      // d/dtau K = K A(s(tau)), tau = t - s.
      const Eigen::MatrixXd k1 = k * a_end;
      const Eigen::MatrixXd k2 = (k + 0.5 * h * k1) * a_mid;
      const Eigen::MatrixXd k3 = (k + 0.5 * h * k2) * a_mid;
      const Eigen::MatrixXd k4 = (k + h * k3) * a_start;
      k += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      kst[i - 1] = k;
    }
  }
  GramianResult g = accumulate(flow, b, kst);
  g.used_backward = true;
  return g;
}

std::size_t k_rank(const FlowResult& flow, const ModelSpec& model, double rel_tol) {
  const CompiledField x0(model.drift);
  const Eigen::MatrixXd b = noise_matrix(model);
  const auto d = static_cast<Eigen::Index>(model.d);
  const auto r = b.cols();
  if (r == 0) return 0;
  std::vector<std::size_t> interior;
  for (std::size_t i = 1; i + 1 < flow.times.size(); ++i) interior.push_back(i);
  Eigen::MatrixXd cols(d, r * static_cast<Eigen::Index>(1 + interior.size()));
  cols.leftCols(r) = b;
  for (std::size_t n = 0; n < interior.size(); ++n)
    cols.middleCols(r * static_cast<Eigen::Index>(n + 1), r) = x0.jacobian(flow.trajectory[interior[n]]) * b;
  return numerical_rank(cols, rel_tol);
}

Eigen::MatrixXd control_sensitivity(const FlowResult& flow, const ModelSpec& model) {
  const Eigen::MatrixXd b = noise_matrix(model);
  const auto d = b.rows();
  const auto r = b.cols();
  const auto kst = transition_to_end(flow);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, r * static_cast<Eigen::Index>(flow.segments.size()));
  for (const auto& seg : flow.segments) {
    const double h = (flow.times[seg.last] - flow.times[seg.first]) / static_cast<double>(seg.last - seg.first);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, r);
    for (std::size_t i = seg.first; i <= seg.last; ++i) acc += simpson_weight(i, seg.first, seg.last, h) * kst[i] * b;
    out.middleCols(static_cast<Eigen::Index>(seg.piece) * r, r) = acc;
  }
  return out;
}

int enclosing_ball(const FlowResult& flow) {
  // The margin keeps a target reached to solver tolerance off the sphere of radius n.
  return static_cast<int>(std::floor(flow.max_norm * (1.0 + 1e-6) + 1e-6)) + 1;
}

}  // namespace hypocone
