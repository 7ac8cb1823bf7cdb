#include "hypocone/compiled_field.hpp"

namespace hypocone {

CompiledField::CompiledField(const PolyVectorField& field) : dim_(field.dim()) {
  for (const auto& comp : field.components()) components_.push_back(compile(comp));
  for (std::size_t j = 0; j < dim_; ++j) {
    for (std::size_t k = 0; k < dim_; ++k) {
      const Polynomial dp = field[j].derivative(k);
      if (dp.is_zero()) continue;
      jacobian_.push_back({static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(k), compile(dp)});
    }
  }
}

CompiledField::CompiledPoly CompiledField::compile(const Polynomial& p) {
  CompiledPoly out{static_cast<std::uint32_t>(terms_.size()), 0};
  for (const auto& [e, c] : p.terms()) {
    Term t{c.get_d(), static_cast<std::uint32_t>(factors_.size()), 0};
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] > 0) factors_.push_back({static_cast<std::uint32_t>(i), e[i]});
    }
    t.end = static_cast<std::uint32_t>(factors_.size());
    terms_.push_back(t);
  }
  out.end = static_cast<std::uint32_t>(terms_.size());
  return out;
}

double CompiledField::eval_poly(const CompiledPoly& p, const double* x) const {
  double sum = 0.0;
  for (std::uint32_t t = p.begin; t < p.end; ++t) {
    const Term& term = terms_[t];
    double v = term.coeff;
    for (std::uint32_t f = term.begin; f < term.end; ++f) {
      const double base = x[factors_[f].var];
      for (std::uint32_t k = 0; k < factors_[f].power; ++k) v *= base;
    }
    sum += v;
  }
  return sum;
}

void CompiledField::eval(const double* x, double* out) const {
  for (std::size_t j = 0; j < dim_; ++j) out[j] = eval_poly(components_[j], x);
}

Eigen::VectorXd CompiledField::operator()(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out(dim_);
  eval(x.data(), out.data());
  return out;
}

Eigen::MatrixXd CompiledField::jacobian(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim_, dim_);
  for (const auto& e : jacobian_) out(e.row, e.col) = eval_poly(e.poly, x.data());
  return out;
}

}  // namespace hypocone
