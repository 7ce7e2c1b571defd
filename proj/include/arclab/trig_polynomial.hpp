#pragma once

#include <vector>

#include "arclab/common.hpp"

namespace arclab {

/// Real trigonometric polynomial V(θ) = Σ_{k=-d}^{d} V_k e^{2πikθ}, V_{-k} = conj(V_k).
class TrigPolynomial {
 public:
  TrigPolynomial() = default;

  /// `coeffs` lists V_{-d}, ..., V_d. Throws ConfigError if the list has even
  /// length, is not Hermitian-symmetric, or has V_d = 0 for d >= 1.
  explicit TrigPolynomial(std::vector<cplx> coeffs);

  /// Builds V from V_0 and V_1..V_d; the negative modes are conjugates.
  static TrigPolynomial from_nonnegative(const std::vector<cplx>& v0_to_vd);

  /// Degree-0 potential; V = 0 gives the free operator.
  static TrigPolynomial constant(double v0);

  /// Almost Mathieu potential 2λ cos 2πθ (V_{±1} = λ).
  static TrigPolynomial amo(double lambda);

  int degree() const { return degree_; }
  cplx coeff(int k) const;
  cplx leading() const { return coeff(degree_); }
  const std::vector<cplx>& coefficients() const { return coeffs_; }

  cplx operator()(cplx z) const;
  double operator()(double x) const { return (*this)(cplx(x, 0.0)).real(); }

  /// max_k |V_k|.
  double max_abs() const;
  TrigPolynomial scaled(double s) const;

 private:
  int degree_ = 0;
  std::vector<cplx> coeffs_;
};

}  // namespace arclab
