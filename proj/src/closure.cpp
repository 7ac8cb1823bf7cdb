#include "hypocone/closure.hpp"

#include <algorithm>
#include <stdexcept>

#include "hypocone/compiled_field.hpp"

namespace hypocone {

namespace {

struct Candidate {
  RationalVector value;
  DerivationPtr derivation;
};

struct WCandidate {
  const PolyVectorField* base = nullptr;  // set for single generators
  PolyVectorField combined = PolyVectorField::zero(1);
  Parity parity = Parity::kEven;
  DerivationPtr derivation;
  const PolyVectorField& field() const { return base ? *base : combined; }
};

struct BracketResult {
  bool valid = false;
  unsigned n = 0;
  PolyVectorField value = PolyVectorField::zero(1);
};

// Key identifying a nonconstant field up to positive scaling and constant terms.
std::string generator_key(const PolyVectorField& f) {
  PolyVectorField g = f.without_constant_terms();
  Rational lead = 0;
  for (const auto& comp : g.components()) {
    if (!comp.is_zero()) {
      lead = abs(comp.terms().begin()->second);
      break;
    }
  }
  if (lead != 0) g *= 1 / lead;
  return g.to_string();
}

std::vector<Candidate> v_candidates(const GenerationState& state, const ClosureOptions& opt,
                                    bool& truncated) {
  std::vector<Candidate> out;
  for (const auto& c : state.odd_constants) out.push_back({c.value, c.derivation});
  // Pairwise integer combinations a*V1 + b*V2 with a > 0 (the sign of the
  // whole combination does not change the relative degree).
  std::size_t added = 0;
  const auto& odd = state.odd_constants;
  for (std::size_t i = 0; i < odd.size(); ++i) {
    for (std::size_t j = i + 1; j < odd.size(); ++j) {
      for (int a = 1; a <= opt.combo_budget; ++a) {
        for (int b = -opt.combo_budget; b <= opt.combo_budget; ++b) {
          if (b == 0) continue;
          if (added >= opt.max_combos) {
            truncated = true;
            return out;
          }
          RationalVector v(state.dim);
          for (std::size_t t = 0; t < state.dim; ++t) v[t] = a * odd[i].value[t] + b * odd[j].value[t];
          if (is_zero_vector(v)) continue;
          out.push_back({std::move(v), Derivation::combination({{Rational(a), odd[i].derivation},
                                                                 {Rational(b), odd[j].derivation}})});
          ++added;
        }
      }
    }
  }
  return out;
}

std::vector<WCandidate> w_candidates(const GenerationState& state, const ClosureOptions& opt,
                                     bool& truncated) {
  std::vector<WCandidate> out;
  const auto& gens = state.nonconstant_generators;
  for (const auto& g : gens) {
    WCandidate w;
    w.base = &g.field;
    w.parity = g.parity;
    w.derivation = g.derivation;
    out.push_back(std::move(w));
  }
  std::size_t added = 0;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    for (std::size_t j = i + 1; j < gens.size(); ++j) {
      const bool j_odd = gens[j].parity == Parity::kOdd;
      for (int c = -opt.combo_budget; c <= opt.combo_budget; ++c) {
        if (c == 0 || (!j_odd && c < 0)) continue;
        if (added >= opt.max_combos) {
          truncated = true;
          return out;
        }
        WCandidate w;
        w.combined = gens[i].field + gens[j].field * Rational(c);
        if (w.combined.without_constant_terms().is_zero()) continue;
        w.parity = (gens[i].parity == Parity::kOdd && j_odd) ? Parity::kOdd : Parity::kEven;
        w.derivation = Derivation::combination({{Rational(1), gens[i].derivation},
                                                {Rational(c), gens[j].derivation}});
        out.push_back(std::move(w));
        ++added;
      }
    }
  }
  return out;
}

BracketResult bracket_candidate(const Candidate& v, const WCandidate& w) {
  BracketResult r;
  const auto n = relative_degree(v.value, w.field());
  // n = 0 gives ad^0 V(W) = W, which is already in the generated set.
  if (!n || n->n == 0) return r;
  r.valid = true;
  r.n = n->n;
  r.value = ad_power(PolyVectorField::constant(v.value), w.field(), n->n);
  return r;
}

}  // namespace

GenerationState closure_init(const ModelSpec& model) {
  model.validate();
  GenerationState s;
  s.dim = model.d;
  s.odd_span = RationalSpan(model.d);
  for (std::size_t j = 0; j < model.r(); ++j) {
    if (is_zero_vector(model.noise[j])) continue;
    if (!s.odd_span.insert(model.noise[j])) continue;
    s.odd_constants.push_back({model.noise[j], Parity::kSeed, Derivation::noise(j, model.noise_labels[j])});
  }
  // X0 itself is a member of the control family; it is used with nonnegative weight only.
  if (!model.drift.is_constant()) {
    s.nonconstant_generators.push_back({model.drift, Parity::kEven, Derivation::drift()});
    s.generator_keys.insert(generator_key(model.drift));
  }
  return s;
}

GenerationState closure_step(const ModelSpec& model, const GenerationState& state,
                             const ClosureOptions& options) {
  GenerationState next = state;
  (void)model;
  next.round = state.round + 1;
  bool truncated = false;
  const auto vs = v_candidates(state, options, truncated);
  const auto ws = w_candidates(state, options, truncated);
  const std::size_t total = vs.size() * ws.size();

  std::vector<BracketResult> results(total);
  if (options.parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(total); ++idx) {
      results[idx] = bracket_candidate(vs[idx / ws.size()], ws[idx % ws.size()]);
    }
  } else {
    for (std::size_t idx = 0; idx < total; ++idx) {
      results[idx] = bracket_candidate(vs[idx / ws.size()], ws[idx % ws.size()]);
    }
  }

  // Deterministic merge in candidate order.
  bool added = false;
  for (std::size_t idx = 0; idx < total; ++idx) {
    auto& r = results[idx];
    if (!r.valid || r.value.is_zero()) continue;
    const auto& v = vs[idx / ws.size()];
    const auto& w = ws[idx % ws.size()];
    const bool odd = r.n % 2 == 1;
    auto derivation = Derivation::adjoint(r.n, v.derivation, w.derivation);

    if (r.value.is_constant()) {
      RationalVector value = r.value.constant_value();
      if (odd) {
        if (next.odd_span.insert(value)) {
          next.odd_constants.push_back({std::move(value), Parity::kOdd, std::move(derivation)});
          added = true;
        }
        continue;
      }
      // Even: one-sided unless W may be used with either sign.
      std::vector<std::pair<RationalVector, DerivationPtr>> dirs{{value, derivation}};
      if (w.parity == Parity::kOdd) {
        RationalVector neg = value;
        for (auto& q : neg) q = -q;
        dirs.emplace_back(std::move(neg),
                          Derivation::adjoint(r.n, v.derivation,
                                              Derivation::combination({{Rational(-1), w.derivation}})));
      }
      for (auto& [val, der] : dirs) {
        const RationalVector key = primitive_direction(next.odd_span.residual(val));
        if (is_zero_vector(key) || next.even_keys.contains(key)) continue;
        next.even_keys.insert(key);
        next.even_constants.push_back({std::move(val), Parity::kEven, std::move(der)});
        added = true;
      }
      continue;
    }

    if (next.nonconstant_generators.size() >= options.max_generators) {
      truncated = true;
      continue;
    }
    std::string key = generator_key(r.value);
    if (next.generator_keys.contains(key)) continue;
    if (odd) {
      // An odd generator also stands for its negation.
      if (next.generator_keys.contains(generator_key(r.value * Rational(-1)))) continue;
    }
    next.generator_keys.insert(std::move(key));
    next.nonconstant_generators.push_back(
        {std::move(r.value), odd ? Parity::kOdd : Parity::kEven, std::move(derivation)});
    added = true;
  }
  next.last_round_added = added;
  next.truncated = state.truncated || truncated;
  return next;
}

std::size_t ConeSpan::rank() const {
  std::vector<RationalVector> all = odd_basis;
  all.insert(all.end(), even_generators.begin(), even_generators.end());
  return exact_rank(all, dim);
}

ConeSpan cone_from_state(const GenerationState& state) {
  ConeSpan c;
  c.dim = state.dim;
  c.rounds = state.round;
  c.exhausted = !state.last_round_added;
  c.odd_fields = state.odd_constants;
  c.even_fields = state.even_constants;
  for (const auto& f : state.odd_constants) c.odd_basis.push_back(f.value);
  std::set<RationalVector> seen;
  for (const auto& f : state.even_constants) {
    RationalVector key = primitive_direction(state.odd_span.residual(f.value));
    if (is_zero_vector(key) || !seen.insert(key).second) continue;
    c.even_generators.push_back(std::move(key));
  }
  return c;
}

ConeSpan compute_C(const ModelSpec& model, const ClosureOptions& options) {
  if (options.max_rounds < 1) throw std::invalid_argument("compute_C: max_rounds must be >= 1");
  GenerationState state = closure_init(model);
  for (int round = 0; round < options.max_rounds; ++round) {
    state = closure_step(model, state, options);
    if (!state.last_round_added) break;
  }
  return cone_from_state(state);
}

Eigen::MatrixXd PositivityBasis::matrix() const {
  const std::size_t d = y.empty() ? 0 : y.front().size();
  Eigen::MatrixXd m(d, y.size());
  for (std::size_t c = 0; c < y.size(); ++c) {
    for (std::size_t r = 0; r < d; ++r) m(r, c) = y[c][r].get_d();
  }
  return m;
}

std::optional<PositivityBasis> choose_basis(const ConeSpan& cone) {
  if (!cone.is_full_dim()) return std::nullopt;
  PositivityBasis b;
  RationalSpan span(cone.dim);
  for (const auto& v : cone.odd_basis) {
    if (span.insert(v)) b.y.push_back(v);
  }
  b.k = b.y.size();
  for (const auto& e : cone.even_generators) {
    if (span.insert(e)) b.y.push_back(e);
  }
  if (b.y.size() != cone.dim) return std::nullopt;
  return b;
}

Membership d_membership(const PositivityBasis& basis, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& z, double strictness_tol) {
  const Eigen::MatrixXd b = basis.matrix();
  if (b.rows() != x.size() || b.rows() != z.size() || b.rows() != b.cols()) {
    throw std::invalid_argument("d_membership: dimension mismatch");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
  if (!lu.isInvertible()) throw std::invalid_argument("d_membership: singular basis matrix");
  const Eigen::VectorXd diff = z - x;
  Membership m;
  m.coeffs = lu.solve(diff);
  const double threshold = strictness_tol * diff.norm();
  m.member = true;
  for (Eigen::Index j = static_cast<Eigen::Index>(basis.k); j < m.coeffs.size(); ++j) {
    if (!(m.coeffs[j] > threshold) || m.coeffs[j] <= 0.0) m.member = false;
  }
  return m;
}

std::size_t numerical_rank(const Eigen::MatrixXd& columns, double rel_tol) {
  if (columns.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(columns);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > rel_tol * s[0]) ++rank;
  }
  return rank;
}

bool twist_rank_check(const ModelSpec& model, const std::vector<Eigen::VectorXd>& points) {
  if (points.empty()) throw std::invalid_argument("twist_rank_check: no points");
  const CompiledField drift(model.drift);
  const std::size_t d = model.d;
  const std::size_t r = model.r();
  Eigen::MatrixXd cols(d, r * (1 + points.size()));
  Eigen::Index c = 0;
  for (std::size_t m = 0; m < r; ++m) {
    for (std::size_t i = 0; i < d; ++i) cols(i, c) = model.noise[m][i].get_d();
    ++c;
  }
  for (const auto& p : points) {
    const Eigen::MatrixXd jac = drift.jacobian(p);
    for (std::size_t m = 0; m < r; ++m) {
      // [X_m, X0](p) = DX0(p) x_m for constant X_m.
      cols.col(c++) = jac * cols.col(static_cast<Eigen::Index>(m));
    }
  }
  return numerical_rank(cols) == d;
}

}  // namespace hypocone
