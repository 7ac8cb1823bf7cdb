#include "hypocone/model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <span>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hypocone/poly_json.hpp"

namespace hypocone {

using nlohmann::json;

void ModelSpec::validate() const {
  if (d == 0) throw ModelError("model '" + name + "': dimension must be positive");
  if (drift.dim() != d) {
    throw ModelError("model '" + name + "': drift has dimension " + std::to_string(drift.dim()) +
                     ", expected " + std::to_string(d));
  }
  for (std::size_t j = 0; j < noise.size(); ++j) {
    if (noise[j].size() != d) {
      throw ModelError("model '" + name + "': noise[" + std::to_string(j) + "] has length " +
                       std::to_string(noise[j].size()) + ", expected " + std::to_string(d));
    }
  }
  if (noise_labels.size() != noise.size()) {
    throw ModelError("model '" + name + "': noise_labels must match the noise count");
  }
  for (const auto& [label, v] : named_fields) {
    if (v.size() != d) throw ModelError("model '" + name + "': named field " + label + " has wrong length");
  }
  if (!coordinate_names.empty() && coordinate_names.size() != d) {
    throw ModelError("model '" + name + "': coordinate_names must have d entries");
  }
  if (default_ball_n < 1) throw ModelError("model '" + name + "': default_ball_n must be >= 1");
}

namespace {

std::vector<std::string> default_labels(std::size_t r) {
  std::vector<std::string> labels;
  for (std::size_t j = 0; j < r; ++j) labels.push_back("X" + std::to_string(j + 1));
  return labels;
}

RationalVector unit(std::size_t d, std::size_t i) {
  RationalVector v(d, Rational(0));
  v[i] = 1;
  return v;
}

// Re-indexes a polynomial in `from` variables into `to` variables starting at `offset`.
Polynomial embed(const Polynomial& p, std::size_t to, std::size_t offset) {
  Polynomial out(to);
  for (const auto& [e, c] : p.terms()) {
    Exponent big(to, 0);
    for (std::size_t i = 0; i < e.size(); ++i) big[offset + i] = e[i];
    out.add_term(big, c);
  }
  return out;
}

}  // namespace

Polynomial quartic_double_well(std::size_t d) {
  Polynomial norm2(d);
  for (std::size_t i = 0; i < d; ++i) {
    const auto yi = Polynomial::variable(d, i);
    norm2 += yi * yi;
  }
  return norm2 * norm2 * Rational(1, 4) - norm2 * Rational(1, 2);
}

ModelSpec langevin(std::size_t d, const Rational& gamma, const std::vector<RationalVector>& sigmas,
                   const Polynomial& potential) {
  if (d == 0) throw ModelError("langevin: d must be positive");
  if (gamma < 0) throw ModelError("langevin: gamma must be nonnegative");
  if (potential.dim() != d) throw ModelError("langevin: potential must be a polynomial in d variables");
  const std::size_t dim = 2 * d;
  // State (x, y): dx = (-gamma x - grad F(y)) dt + sum sigma_j dW, dy = x dt.
  std::vector<Polynomial> comps(dim, Polynomial(dim));
  for (std::size_t i = 0; i < d; ++i) {
    comps[i] = Polynomial::variable(dim, i) * (-gamma) - embed(potential.derivative(i), dim, d);
    comps[d + i] = Polynomial::variable(dim, i);
  }
  ModelSpec spec;
  spec.name = "langevin";
  spec.d = dim;
  spec.drift = PolyVectorField(std::move(comps));
  for (const auto& s : sigmas) {
    if (s.size() != d) throw ModelError("langevin: each sigma_j must have length d");
    RationalVector v(dim, Rational(0));
    std::copy(s.begin(), s.end(), v.begin());
    spec.noise.push_back(v);
  }
  spec.noise_labels = default_labels(spec.noise.size());
  spec.params = {{"d", Rational(static_cast<long>(d))}, {"gamma", gamma}};
  for (std::size_t i = 0; i < d; ++i) spec.coordinate_names.push_back(d == 1 ? "x" : "x" + std::to_string(i + 1));
  for (std::size_t i = 0; i < d; ++i) spec.coordinate_names.push_back(d == 1 ? "y" : "y" + std::to_string(i + 1));
  spec.default_ball_n = 10;

  // Closed forms: [X_j, X0] = (-gamma sigma_j, sigma_j); every (0, y) is an
  // equilibrium of the control family when the sigma_j span R^d.
  std::vector<RationalVector> odd;
  for (std::size_t j = 0; j < spec.noise.size(); ++j) {
    RationalVector b(dim, Rational(0));
    for (std::size_t i = 0; i < d; ++i) {
      b[i] = -gamma * sigmas[j][i];
      b[d + i] = sigmas[j][i];
    }
    spec.facts.brackets.push_back(
        {"[" + spec.noise_labels[j] + ",X0]", PolyVectorField::constant(b)});
    odd.push_back(spec.noise[j]);
    odd.push_back(b);
  }
  spec.facts.cone = ExpectedCone{odd, {}};
  spec.facts.equilibrium_distance = [d](std::span<const double> y) {
    double s = 0;
    for (std::size_t i = 0; i < d; ++i) s += y[i] * y[i];
    return std::sqrt(s);
  };
  spec.facts.sample_equilibrium = std::vector<double>(dim, 0.0);
  spec.validate();
  return spec;
}

ModelSpec bhw(const Rational& a1, const Rational& a2, const Rational& alpha1,
              const Rational& alpha2, const Rational& eps) {
  if (!(alpha2 > alpha1 && alpha1 > 0)) throw ModelError("bhw: requires alpha2 > alpha1 > 0");
  if (!(eps > 0)) throw ModelError("bhw: requires eps > 0");
  const auto x = Polynomial::variable(2, 0);
  const auto y = Polynomial::variable(2, 1);
  ModelSpec spec;
  spec.name = "bhw";
  spec.d = 2;
  spec.drift = PolyVectorField({x * a1 - x * x * alpha1 + y * y, y * a2 - x * y * alpha2});
  spec.noise = {{Rational(0), eps}};
  spec.noise_labels = default_labels(1);
  spec.coordinate_names = {"x", "y"};
  spec.params = {{"a1", a1}, {"a2", a2}, {"alpha1", alpha1}, {"alpha2", alpha2}, {"eps", eps}};
  spec.default_ball_n = 10;

  // [X1, X0] = eps (2y, a2 - alpha2 x) and ad^2 X1 (X0) = 2 eps^2 d/dx.
  spec.facts.brackets.push_back(
      {"[X1,X0]", PolyVectorField({y * (2 * eps), (Polynomial::constant(2, a2) - x * alpha2) * eps})});
  spec.facts.brackets.push_back(
      {"ad^2(X1)(X0)", PolyVectorField::constant({2 * eps * eps, Rational(0)})});
  spec.facts.cone = ExpectedCone{{{Rational(0), Rational(1)}}, {{Rational(1), Rational(0)}}};
  const double a1d = a1.get_d();
  const double al1 = alpha1.get_d();
  spec.facts.equilibrium_distance = [a1d, al1](std::span<const double> p) {
    const double disc = std::sqrt(a1d * a1d + 4 * al1 * p[1] * p[1]);
    const double plus = (a1d + disc) / (2 * al1);
    const double minus = (a1d - disc) / (2 * al1);
    return std::min(std::abs(p[0] - plus), std::abs(p[0] - minus));
  };
  spec.facts.sample_equilibrium = std::vector<double>{(a1d + std::sqrt(a1d * a1d + 4 * al1)) / (2 * al1), 1.0};
  spec.validate();
  return spec;
}

std::vector<Mode> burgers_modes(int n) {
  std::vector<Mode> modes;
  for (int shell = 1; shell <= n; ++shell) {
    for (int k1 = -shell; k1 <= shell; ++k1) {
      for (int k2 = -shell; k2 <= shell; ++k2) {
        if (std::max(std::abs(k1), std::abs(k2)) == shell) modes.emplace_back(k1, k2);
      }
    }
  }
  return modes;
}

std::size_t burgers_coordinate(int n, const Mode& k) {
  const auto modes = burgers_modes(n);
  const auto it = std::find(modes.begin(), modes.end(), k);
  if (it == modes.end()) {
    throw ModelError("mode (" + std::to_string(k.first) + "," + std::to_string(k.second) +
                     ") is outside H_" + std::to_string(n));
  }
  return 4 * static_cast<std::size_t>(it - modes.begin());
}

std::set<Mode> low_modes() {
  std::set<Mode> out;
  for (const auto& k : burgers_modes(1)) out.insert(k);
  return out;
}

namespace {

std::string mode_label(const std::string& prefix, const Mode& k) {
  return prefix + "(" + std::to_string(k.first) + "," + std::to_string(k.second) + ")";
}

// Complex-valued polynomial in the real Burgers coordinates.
struct ComplexPoly {
  Polynomial re;
  Polynomial im;
  explicit ComplexPoly(std::size_t dim) : re(dim), im(dim) {}
  ComplexPoly(Polynomial r, Polynomial i) : re(std::move(r)), im(std::move(i)) {}

  ComplexPoly& operator+=(const ComplexPoly& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  friend ComplexPoly operator*(const ComplexPoly& a, const ComplexPoly& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend ComplexPoly operator*(const ComplexPoly& a, const Rational& c) { return {a.re * c, a.im * c}; }
};

Rational norm2(const Mode& k) { return Rational(k.first * k.first + k.second * k.second); }
Rational dot2(int a1, int a2, int b1, int b2) { return Rational(a1 * b1 + a2 * b2); }

}  // namespace

ModelSpec burgers(int n, const Rational& nu, const std::set<Mode>& forced_sigma,
                  const std::set<Mode>& forced_gamma) {
  if (n < 2) throw ModelError("burgers: N must be at least 2");
  if (!(nu > 0)) throw ModelError("burgers: nu must be positive");
  const auto modes = burgers_modes(n);
  const std::size_t dim = 4 * modes.size();
  std::map<Mode, std::size_t> base;
  for (std::size_t i = 0; i < modes.size(); ++i) base[modes[i]] = 4 * i;
  auto in_hn = [&](const Mode& k) { return base.contains(k); };
  for (const auto& k : forced_sigma) {
    if (!in_hn(k)) throw ModelError("burgers: forced index " + mode_label("", k) + " outside H_N");
  }
  for (const auto& k : forced_gamma) {
    if (!in_hn(k)) throw ModelError("burgers: forced index " + mode_label("", k) + " outside H_N");
  }

  // u_k = w_k k^perp/|k|^2 + q_k k/|k|^2, as two complex-valued components.
  auto velocity = [&](const Mode& k) {
    const std::size_t b = base.at(k);
    const ComplexPoly w(Polynomial::variable(dim, b), Polynomial::variable(dim, b + 1));
    const ComplexPoly q(Polynomial::variable(dim, b + 2), Polynomial::variable(dim, b + 3));
    const Rational inv = 1 / norm2(k);
    const int perp[2] = {-k.second, k.first};
    const int par[2] = {k.first, k.second};
    std::array<ComplexPoly, 2> u{ComplexPoly(dim), ComplexPoly(dim)};
    for (int c = 0; c < 2; ++c) {
      u[c] += w * Rational(perp[c]) * inv;
      u[c] += q * Rational(par[c]) * inv;
    }
    return u;
  };

  std::vector<Polynomial> comps(dim, Polynomial(dim));
  for (const auto& k : modes) {
    // F_k = sum_{l, k-l in H_N} <u_l, k-l> u_{k-l}.
    std::array<ComplexPoly, 2> f{ComplexPoly(dim), ComplexPoly(dim)};
    for (const auto& l : modes) {
      const Mode kl{k.first - l.first, k.second - l.second};
      if (!in_hn(kl)) continue;
      const auto ul = velocity(l);
      const auto ukl = velocity(kl);
      ComplexPoly coupling = ul[0] * Rational(kl.first);
      coupling += ul[1] * Rational(kl.second);
      for (int c = 0; c < 2; ++c) f[c] += coupling * ukl[c];
    }
    // F_perp = <F_k, k^perp>, F_par = <F_k, k>.
    ComplexPoly f_perp = f[0] * Rational(-k.second);
    f_perp += f[1] * Rational(k.first);
    ComplexPoly f_par = f[0] * Rational(k.first);
    f_par += f[1] * Rational(k.second);

    const std::size_t b = base.at(k);
    const Rational damp = -nu * norm2(k);
    // i (A + iB) = -B + iA.
    comps[b] = Polynomial::variable(dim, b) * damp - f_perp.im;
    comps[b + 1] = Polynomial::variable(dim, b + 1) * damp + f_perp.re;
    comps[b + 2] = Polynomial::variable(dim, b + 2) * damp - f_par.im;
    comps[b + 3] = Polynomial::variable(dim, b + 3) * damp + f_par.re;
  }

  ModelSpec spec;
  spec.name = "burgers";
  spec.d = dim;
  spec.drift = PolyVectorField(std::move(comps));
  for (const auto& k : modes) {
    const std::size_t b = base.at(k);
    if (forced_sigma.contains(k)) {
      spec.noise.push_back(unit(dim, b));
      spec.noise_labels.push_back(mode_label("X", k));
      spec.noise.push_back(unit(dim, b + 1));
      spec.noise_labels.push_back(mode_label("Y", k));
    }
  }
  for (const auto& k : modes) {
    const std::size_t b = base.at(k);
    if (forced_gamma.contains(k)) {
      spec.noise.push_back(unit(dim, b + 2));
      spec.noise_labels.push_back(mode_label("Xt", k));
      spec.noise.push_back(unit(dim, b + 3));
      spec.noise_labels.push_back(mode_label("Yt", k));
    }
  }
  for (const auto& k : modes) {
    const std::size_t b = base.at(k);
    spec.named_fields[mode_label("X", k)] = unit(dim, b);
    spec.named_fields[mode_label("Y", k)] = unit(dim, b + 1);
    spec.named_fields[mode_label("Xt", k)] = unit(dim, b + 2);
    spec.named_fields[mode_label("Yt", k)] = unit(dim, b + 3);
  }
  spec.coordinate_names.resize(dim);
  for (const auto& k : modes) {
    const std::size_t b = base.at(k);
    const std::string suffix = mode_label("", k);
    spec.coordinate_names[b] = "Re_w" + suffix;
    spec.coordinate_names[b + 1] = "Im_w" + suffix;
    spec.coordinate_names[b + 2] = "Re_q" + suffix;
    spec.coordinate_names[b + 3] = "Im_q" + suffix;
  }
  spec.params = {{"N", Rational(n)}, {"nu", nu}};
  spec.default_ball_n = 100;

  // Closed-form second brackets [A_m, [X_j, X0]] for a sample of (j, m).
  const std::vector<std::pair<Mode, Mode>> pairs = {
      {{1, 0}, {0, 1}}, {{1, 0}, {0, -1}}, {{1, 1}, {0, -1}},
      {{-1, -1}, {1, 0}}, {{0, 1}, {2, -1}}, {{1, 0}, {1, 1}}};
  for (const auto& [j, m] : pairs) {
    const Mode s{j.first + m.first, j.second + m.second};
    if (!in_hn(s)) continue;
    const Rational jm = norm2(j);
    const Rational mm = norm2(m);
    const Rational jperp_m = dot2(-j.second, j.first, m.first, m.second);
    const Rational c1 = jperp_m * (1 / jm - 1 / mm);
    const Rational c2 = 2 * jperp_m * jperp_m / (jm * mm);
    const Rational c3 = dot2(m.first, m.second, s.first, s.second) / mm;
    const Rational c4 =
        jperp_m * dot2(m.first, m.second, m.first + 2 * j.first, m.second + 2 * j.second) / (jm * mm);
    const std::size_t b = base.at(s);
    auto field = [&](std::size_t i1, const Rational& v1, std::size_t i2, const Rational& v2) {
      RationalVector v(dim, Rational(0));
      v[b + i1] += v1;
      v[b + i2] += v2;
      return PolyVectorField::constant(v);
    };
    const std::string inner = "[" + mode_label("X", j) + ",X0]";
    spec.facts.brackets.push_back({"[" + mode_label("X", m) + "," + inner + "]", field(1, c1, 3, -c2)});
    spec.facts.brackets.push_back({"[" + mode_label("Y", m) + "," + inner + "]", field(0, -c1, 2, c2)});
    spec.facts.brackets.push_back({"[" + mode_label("Xt", m) + "," + inner + "]", field(1, c3, 3, c4)});
    spec.facts.brackets.push_back({"[" + mode_label("Yt", m) + "," + inner + "]", field(0, -c3, 2, -c4)});
  }
  spec.facts.sample_equilibrium = std::vector<double>(dim, 0.0);
  spec.validate();
  return spec;
}

ModelSpec nonexample3d() {
  const auto x = Polynomial::variable(3, 0);
  const auto y = Polynomial::variable(3, 1);
  const auto z = Polynomial::variable(3, 2);
  ModelSpec spec;
  spec.name = "nonexample3d";
  spec.d = 3;
  spec.drift = PolyVectorField({-(x * y), x * x - y * z, y * y - z});
  spec.noise = {unit(3, 0)};
  spec.noise_labels = default_labels(1);
  spec.coordinate_names = {"x", "y", "z"};
  spec.default_ball_n = 10;
  spec.facts.brackets.push_back({"ad^2(X1)(X0)", PolyVectorField::constant({0, 2, 0})});
  spec.facts.cone = ExpectedCone{{unit(3, 0)}, {unit(3, 1)}};
  spec.validate();
  return spec;
}

json model_to_json(const ModelSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["d"] = spec.d;
  j["drift"] = to_json(spec.drift);
  j["noise"] = json::array();
  for (const auto& v : spec.noise) j["noise"].push_back(to_json(v));
  j["noise_labels"] = spec.noise_labels;
  j["params"] = json::object();
  for (const auto& [k, v] : spec.params) j["params"][k] = format_rational(v);
  j["default_ball_n"] = spec.default_ball_n;
  if (!spec.coordinate_names.empty()) j["coordinate_names"] = spec.coordinate_names;
  if (!spec.named_fields.empty()) {
    j["named"] = json::object();
    for (const auto& [k, v] : spec.named_fields) j["named"][k] = to_json(v);
  }
  return j;
}

ModelSpec model_from_json(const json& j) {
  try {
    if (!j.is_object()) throw ModelError("model: top level must be an object");
    for (const char* key : {"name", "d", "drift", "noise"}) {
      if (!j.contains(key)) throw ModelError(std::string("model: missing field \"") + key + "\"");
    }
    if (!j["d"].is_number_unsigned() || j["d"].get<std::size_t>() == 0) {
      throw ModelError("model.d: must be a positive integer");
    }
    ModelSpec spec;
    spec.name = j["name"].get<std::string>();
    spec.d = j["d"].get<std::size_t>();
    spec.drift = vector_field_from_json(j["drift"], spec.d, "drift");
    if (!j["noise"].is_array()) throw ModelError("noise: must be a list of vectors");
    for (std::size_t i = 0; i < j["noise"].size(); ++i) {
      spec.noise.push_back(
          rational_vector_from_json(j["noise"][i], spec.d, "noise[" + std::to_string(i) + "]"));
    }
    if (j.contains("noise_labels")) {
      spec.noise_labels = j["noise_labels"].get<std::vector<std::string>>();
    } else {
      spec.noise_labels = default_labels(spec.noise.size());
    }
    if (j.contains("params")) {
      if (!j["params"].is_object()) throw ModelError("params: must be an object");
      for (const auto& [k, v] : j["params"].items()) {
        spec.params[k] = parse_rational(v.is_string() ? v.get<std::string>() : v.dump());
      }
    }
    if (j.contains("default_ball_n")) spec.default_ball_n = j["default_ball_n"].get<int>();
    if (j.contains("coordinate_names")) {
      spec.coordinate_names = j["coordinate_names"].get<std::vector<std::string>>();
    }
    if (j.contains("named")) {
      for (const auto& [k, v] : j["named"].items()) {
        spec.named_fields[k] = rational_vector_from_json(v, spec.d, "named." + k);
      }
    }
    spec.validate();
    return spec;
  } catch (const ModelError&) {
    throw;
  } catch (const std::exception& e) {
    throw ModelError(e.what());
  }
}

ModelSpec load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ModelError(path + ": " + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const ModelError& e) {
    throw ModelError(path + ": " + e.what());
  }
}

void save_model(const ModelSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ModelError("cannot write model file '" + path + "'");
  out << model_to_json(spec).dump(2) << "\n";
}

namespace {

class BracketParser {
 public:
  BracketParser(const ModelSpec& spec, std::string_view text) : spec_(spec), text_(text) {}

  PolyVectorField parse() {
    auto v = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ModelError("bracket expression: " + what + " at offset " + std::to_string(pos_) +
                     " in '" + std::string(text_) + "'");
  }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  PolyVectorField expr() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end");
    if (text_[pos_] == '[') {
      ++pos_;
      auto a = expr();
      expect(',');
      auto b = expr();
      expect(']');
      return lie_bracket(a, b);
    }
    if (text_.substr(pos_, 3) == "ad^") {
      pos_ += 3;
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected a power after ad^");
      const unsigned m = static_cast<unsigned>(std::stoul(std::string(text_.substr(start, pos_ - start))));
      expect('(');
      auto v = expr();
      expect(')');
      expect('(');
      auto w = expr();
      expect(')');
      return ad_power(v, w, m);
    }
    return leaf();
  }

  PolyVectorField leaf() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (pos_ < text_.size() && text_[pos_] == '(') {
      // Mode-indexed names such as X(1,-1).
      while (pos_ < text_.size() && text_[pos_] != ')') ++pos_;
      if (pos_ >= text_.size()) fail("unterminated field index");
      ++pos_;
    }
    std::string name(text_.substr(start, pos_ - start));
    name.erase(std::remove(name.begin(), name.end(), ' '), name.end());
    if (name.empty()) fail("expected a field name");
    if (name == "X0") return spec_.drift;
    for (std::size_t j = 0; j < spec_.noise_labels.size(); ++j) {
      if (spec_.noise_labels[j] == name) return PolyVectorField::constant(spec_.noise[j]);
    }
    if (auto it = spec_.named_fields.find(name); it != spec_.named_fields.end()) {
      return PolyVectorField::constant(it->second);
    }
    pos_ = start;
    fail("unknown field '" + name + "'");
  }

  const ModelSpec& spec_;
  std::string_view text_;
  std::size_t pos_ = 0;
};

Rational param_or(const std::map<std::string, std::string>& p, const std::string& key,
                  const Rational& fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  try {
    return parse_rational(it->second);
  } catch (const std::invalid_argument& e) {
    throw ModelError("parameter " + key + ": " + e.what());
  }
}

void reject_unknown(const std::map<std::string, std::string>& p, std::initializer_list<const char*> known,
                    const std::string& model) {
  for (const auto& [k, v] : p) {
    if (std::none_of(known.begin(), known.end(), [&](const char* s) { return k == s; })) {
      throw ModelError("builtin " + model + ": unknown parameter '" + k + "'");
    }
  }
}

}  // namespace

PolyVectorField evaluate_bracket_expression(const ModelSpec& spec, std::string_view expr) {
  return BracketParser(spec, expr).parse();
}

std::vector<BuiltinInfo> builtin_models() {
  return {
      {"langevin", "Langevin dynamics on R^{2d}: dx = (-gamma x - grad F(y)) dt + sum sigma_j dW, dy = x dt",
       "d=1 gamma=1 potential=quartic|zero (sigma_j = e_j)"},
      {"bhw", "2-D inertial-particle transport: dx = (a1 x - alpha1 x^2 + y^2) dt, dy = (a2 y - alpha2 x y) dt + eps dW",
       "a1=0 a2=0 alpha1=1 alpha2=2 eps=1"},
      {"burgers", "Galerkin truncation of stochastic 2-D Burgers in (Re w_k, Im w_k, Re q_k, Im q_k) coordinates",
       "N=2 nu=1 forcing=low|compressible"},
      {"nonexample3d", "3-D system with Hoermander's condition but a 2-dimensional cone: dx = -xy dt + dB",
       "(none)"},
  };
}

ModelSpec make_builtin(const std::string& name, const std::map<std::string, std::string>& p) {
  if (name == "langevin") {
    reject_unknown(p, {"d", "gamma", "potential"}, name);
    const Rational dq = param_or(p, "d", 1);
    if (dq.get_den() != 1 || dq < 1) throw ModelError("langevin: d must be a positive integer");
    const auto d = static_cast<std::size_t>(dq.get_num().get_ui());
    const Rational gamma = param_or(p, "gamma", 1);
    const std::string pot = p.contains("potential") ? p.at("potential") : "quartic";
    Polynomial f(d);
    if (pot == "quartic") {
      f = quartic_double_well(d);
    } else if (pot != "zero") {
      throw ModelError("langevin: potential must be quartic or zero");
    }
    std::vector<RationalVector> sig;
    for (std::size_t j = 0; j < d; ++j) sig.push_back(unit(d, j));
    return langevin(d, gamma, sig, f);
  }
  if (name == "bhw") {
    reject_unknown(p, {"a1", "a2", "alpha1", "alpha2", "eps"}, name);
    return bhw(param_or(p, "a1", 0), param_or(p, "a2", 0), param_or(p, "alpha1", 1),
               param_or(p, "alpha2", 2), param_or(p, "eps", 1));
  }
  if (name == "burgers") {
    reject_unknown(p, {"N", "nu", "forcing"}, name);
    const Rational nq = param_or(p, "N", 2);
    if (nq.get_den() != 1) throw ModelError("burgers: N must be an integer");
    const std::string forcing = p.contains("forcing") ? p.at("forcing") : "low";
    if (forcing == "low") return burgers(static_cast<int>(nq.get_num().get_si()), param_or(p, "nu", 1), low_modes(), {});
    if (forcing == "compressible") {
      return burgers(static_cast<int>(nq.get_num().get_si()), param_or(p, "nu", 1), {}, low_modes());
    }
    throw ModelError("burgers: forcing must be low or compressible");
  }
  if (name == "nonexample3d") {
    reject_unknown(p, {}, name);
    return nonexample3d();
  }
  throw ModelError("unknown builtin model '" + name + "'");
}

}  // namespace hypocone
