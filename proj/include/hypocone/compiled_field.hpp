#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "hypocone/vector_field.hpp"

namespace hypocone {

/// Double-precision evaluator for a fixed polynomial vector field and its
/// Jacobian. Coefficients are rounded once at construction.
class CompiledField {
 public:
  explicit CompiledField(const PolyVectorField& field);

  std::size_t dim() const { return dim_; }
  void eval(const double* x, double* out) const;
  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
  /// Entry (j, k) = dX^j/dx_k at x.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;

 private:
  struct Factor {
    std::uint32_t var;
    std::uint32_t power;
  };
  struct Term {
    double coeff;
    std::uint32_t begin;  // into factors_
    std::uint32_t end;
  };
  struct CompiledPoly {
    std::uint32_t begin;  // into terms_
    std::uint32_t end;
  };

  CompiledPoly compile(const Polynomial& p);
  double eval_poly(const CompiledPoly& p, const double* x) const;

  std::size_t dim_;
  std::vector<Factor> factors_;
  std::vector<Term> terms_;
  std::vector<CompiledPoly> components_;
  struct JacEntry {
    std::uint32_t row;
    std::uint32_t col;
    CompiledPoly poly;
  };
  std::vector<JacEntry> jacobian_;
};

}  // namespace hypocone
