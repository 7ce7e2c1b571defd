#include "arclab/trig_polynomial.hpp"

#include <algorithm>

#include "arclab/error.hpp"

namespace arclab {

TrigPolynomial::TrigPolynomial(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() % 2 == 0) throw ConfigError("potential needs 2d+1 coefficients");
  degree_ = static_cast<int>(coeffs_.size() / 2);
  const double scale = std::max(1.0, max_abs());
  for (int k = 0; k <= degree_; ++k) {
    if (std::abs(coeff(-k) - std::conj(coeff(k))) > 1e-12 * scale) {
      throw ConfigError("potential is not real: V_{-k} != conj(V_k) at k=" + std::to_string(k));
    }
  }
  if (degree_ > 0 && std::abs(leading()) == 0.0) {
    throw ConfigError("leading coefficient V_d is zero");
  }
}

TrigPolynomial TrigPolynomial::from_nonnegative(const std::vector<cplx>& v0_to_vd) {
  if (v0_to_vd.empty()) throw ConfigError("need at least V_0");
  const int d = static_cast<int>(v0_to_vd.size()) - 1;
  std::vector<cplx> c(static_cast<std::size_t>(2 * d + 1));
  for (int k = 0; k <= d; ++k) {
    c[static_cast<std::size_t>(d + k)] = v0_to_vd[static_cast<std::size_t>(k)];
    c[static_cast<std::size_t>(d - k)] = std::conj(v0_to_vd[static_cast<std::size_t>(k)]);
  }
  c[static_cast<std::size_t>(d)] = cplx(v0_to_vd[0].real(), 0.0);
  return TrigPolynomial(std::move(c));
}

TrigPolynomial TrigPolynomial::constant(double v0) { return TrigPolynomial({cplx(v0)}); }

TrigPolynomial TrigPolynomial::amo(double lambda) {
  return TrigPolynomial({cplx(lambda), cplx(0.0), cplx(lambda)});
}

cplx TrigPolynomial::coeff(int k) const {
  if (k < -degree_ || k > degree_) return {0.0, 0.0};
  return coeffs_[static_cast<std::size_t>(k + degree_)];
}

cplx TrigPolynomial::operator()(cplx z) const {
  cplx s = coeff(0);
  for (int k = 1; k <= degree_; ++k) {
    s += coeff(k) * fourier_mode(k, z) + coeff(-k) * fourier_mode(-k, z);
  }
  return s;
}

double TrigPolynomial::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

TrigPolynomial TrigPolynomial::scaled(double s) const {
  std::vector<cplx> c = coeffs_;
  for (auto& v : c) v *= s;
  return TrigPolynomial(std::move(c));
}

}  // namespace arclab
