#include "hypocone/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hypocone/compiled_field.hpp"
#include "hypocone/flow.hpp"

namespace hypocone {

EquilibriumCheck is_equilibrium(const ModelSpec& model, const Eigen::VectorXd& y, double tol) {
  if (static_cast<std::size_t>(y.size()) != model.d) throw std::invalid_argument("is_equilibrium: wrong dimension");
  const Eigen::VectorXd f = CompiledField(model.drift)(y);
  const Eigen::MatrixXd b = noise_matrix(model);
  EquilibriumCheck out;
  if (b.cols() == 0) {
    out.u = Eigen::VectorXd(0);
  } else {
    out.u = b.completeOrthogonalDecomposition().solve(-f);
  }
  out.residual = (b.cols() == 0 ? f : Eigen::VectorXd(f + b * out.u)).norm();
  out.ok = out.residual <= tol;
  return out;
}

ExactEquilibriumCheck is_equilibrium_exact(const ModelSpec& model, const RationalVector& y) {
  RationalSpan span(model.d);
  for (const auto& v : model.noise) span.insert(v);
  const RationalVector res = span.residual(model.drift.eval_exact(y));
  ExactEquilibriumCheck out;
  out.residual_squared = dot(res, res);
  out.ok = out.residual_squared == 0;
  return out;
}

void Box::validate(std::size_t d) const {
  if (static_cast<std::size_t>(lo.size()) != d || static_cast<std::size_t>(hi.size()) != d)
    throw std::invalid_argument("box: dimension mismatch");
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (!(hi(i) > lo(i)) || !std::isfinite(lo(i)) || !std::isfinite(hi(i)))
      throw std::invalid_argument("box: degenerate interval in coordinate " + std::to_string(i + 1));
}

bool Box::contains(const Eigen::VectorXd& y, double slack) const {
  return ((y - lo).array() >= -slack).all() && ((hi - y).array() >= -slack).all();
}

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

double radical_inverse(std::uint64_t i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
    i /= static_cast<std::uint64_t>(base);
  }
  return r;
}

// Halton point; the seed selects the offset into the sequence and a Cranley-Patterson shift
// is avoided so seed 0 reproduces the textbook sequence.
Eigen::VectorXd halton_start(const Box& box, std::uint64_t index) {
  const auto d = box.lo.size();
  Eigen::VectorXd p(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const int base = kPrimes[static_cast<std::size_t>(k) % std::size(kPrimes)];
    // Beyond the prime table the digits repeat with a coordinate-dependent offset.
    const std::uint64_t skip = static_cast<std::uint64_t>(k) / std::size(kPrimes) * 7919u;
    p(k) = box.lo(k) + (box.hi(k) - box.lo(k)) * radical_inverse(index + skip, base);
  }
  return p;
}

struct Attempt {
  bool ok = false;
  Eigen::VectorXd y;
};

Attempt newton(const CompiledField& x0, const Eigen::MatrixXd& q, Eigen::VectorXd y,
               const EquilibriumSearchOptions& options) {
  // q: orthonormal basis of span{X_j}^perp, so g(y) = q^T X0(y).
  Attempt a;
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::VectorXd g = q.transpose() * x0(y);
    const double gn = g.norm();
    if (!std::isfinite(gn)) return a;
    if (gn <= 0.01 * options.tol || (gn <= options.tol && gn >= 0.5 * prev)) break;
    prev = gn;
    const Eigen::MatrixXd jg = q.transpose() * x0.jacobian(y);
    const Eigen::VectorXd step = jg.completeOrthogonalDecomposition().solve(-g);
    if (!step.allFinite()) return a;
    // Damped step: halve until the residual does not grow.
    double s = 1.0;
    Eigen::VectorXd trial = y + step;
    for (int k = 0; k < 30; ++k) {
      const double tn = (q.transpose() * x0(trial)).norm();
      if (std::isfinite(tn) && tn < gn) break;
      s *= 0.5;
      trial = y + s * step;
    }
    y = trial;
  }
  a.y = y;
  a.ok = y.allFinite();
  return a;
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

std::vector<EquilibriumPoint> find_equilibria(const ModelSpec& model, const Box& box, int n_starts,
                                              std::uint64_t seed, const EquilibriumSearchOptions& options) {
  box.validate(model.d);
  if (n_starts < 1) throw std::invalid_argument("find_equilibria: n_starts must be positive");
  const Eigen::MatrixXd b = noise_matrix(model);
  const auto d = static_cast<Eigen::Index>(model.d);
  Eigen::Index rank_b = 0;
  Eigen::MatrixXd q;
  if (b.cols() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeFullU);
    rank_b = static_cast<Eigen::Index>(numerical_rank(b));
    q = svd.matrixU().rightCols(d - rank_b);
  } else {
    q = Eigen::MatrixXd::Identity(d, d);
  }
  if (rank_b == d) {
    const auto chk = is_equilibrium(model, box.center(), options.tol);
    return {EquilibriumPoint{box.center(), chk.u, chk.residual}};
  }

  const CompiledField x0(model.drift);
  std::vector<Attempt> attempts(static_cast<std::size_t>(n_starts));
  // Index 0 of the Halton sequence is the box corner; start from 1.
  const std::uint64_t offset = 1 + seed * static_cast<std::uint64_t>(n_starts);
#pragma omp parallel for schedule(dynamic) if (options.parallel)
  for (int i = 0; i < n_starts; ++i)
    attempts[static_cast<std::size_t>(i)] = newton(x0, q, halton_start(box, offset + static_cast<std::uint64_t>(i)), options);

  std::vector<EquilibriumPoint> found;
  for (const auto& a : attempts) {
    if (!a.ok || !box.contains(a.y, 1e-9)) continue;
    const auto chk = is_equilibrium(model, a.y, options.tol);
    if (chk.ok) found.push_back({a.y, chk.u, chk.residual});
  }
  std::sort(found.begin(), found.end(), [](const EquilibriumPoint& a, const EquilibriumPoint& b) {
    if (a.residual != b.residual) return a.residual < b.residual;
    return lex_less(a.y, b.y);
  });
  std::vector<EquilibriumPoint> out;
  for (auto& p : found) {
    const bool dup = std::any_of(out.begin(), out.end(), [&](const EquilibriumPoint& o) {
      return (o.y - p.y).norm() <= options.dedupe_radius;
    });
    if (!dup) out.push_back(std::move(p));
  }
  // Final order is by (residual, lexicographic y) after deduplication as well.
  return out;
}

std::optional<PositivityChain> build_chain(const ModelSpec& model, const PositivityBasis& basis,
                                           const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                                           const std::vector<EquilibriumPoint>& equilibria) {
  std::optional<PositivityChain> best;
  for (const auto& e : equilibria) {
    if (!is_equilibrium(model, e.y, std::max(kEquilibriumTol, e.residual)).ok) continue;
    auto first = d_membership(basis, x, e.y);
    if (!first.member) continue;
    auto second = d_membership(basis, e.y, z);
    if (!second.member) continue;
    if (best && (best->y - x).norm() <= (e.y - x).norm()) continue;
    best = PositivityChain{x, e.y, z, std::move(first), std::move(second), e};
  }
  return best;
}

}  // namespace hypocone
