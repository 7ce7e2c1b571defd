#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "arclab/common.hpp"
#include "arclab/error.hpp"
#include "arclab/trig_polynomial.hpp"

namespace arclab {

using MatC = Eigen::MatrixXcd;

enum class CocycleKind { kSchrodinger, kDualFiniteRange, kGeneric };

std::string to_string(CocycleKind kind);

/// Quasiperiodic cocycle (α, A) with A(z) a matrix trigonometric polynomial,
/// stored as a constant part plus sparse Fourier entries.
class QuasiperiodicCocycle {
 public:
  struct FourierEntry {
    long mode = 0;
    int row = 0;
    int col = 0;
    cplx coeff;
  };

  QuasiperiodicCocycle(CocycleKind kind, double alpha, MatC constant, std::vector<FourierEntry> entries);

  /// Generic cocycle from dense Fourier matrices; `modes[i]` is the frequency of `matrices[i]`.
  static QuasiperiodicCocycle generic(double alpha, const std::vector<long>& modes, const std::vector<MatC>& matrices);

  CocycleKind kind() const { return kind_; }
  double frequency() const { return alpha_; }
  int dimension() const { return static_cast<int>(constant_.rows()); }

  MatC operator()(cplx z) const;

  /// Evaluates into a preallocated matrix of matching size.
  template <class Matrix>
  void evaluate(cplx z, Matrix& out) const {
    out = constant_;
    for (const auto& e : entries_) out(e.row, e.col) += e.coeff * fourier_mode(e.mode, z);
  }

  /// Same as `evaluate` with w = e^{2πiz} supplied, so iterations can update w by multiplication.
  template <class Matrix>
  void evaluate_w(cplx w, Matrix& out) const {
    out = constant_;
    for (const auto& e : entries_) out(e.row, e.col) += e.coeff * int_power(w, e.mode);
  }

  long max_mode() const { return max_mode_; }

 private:
  CocycleKind kind_;
  double alpha_;
  MatC constant_;
  std::vector<FourierEntry> entries_;
  long max_mode_ = 0;

  static cplx int_power(cplx w, long m) {
    if (m == 0) return 1.0;
    if (m < 0) return int_power(1.0 / w, -m);
    cplx r = w;
    for (long i = 1; i < m; ++i) r *= w;
    return r;
  }
};

/// A_E(z) = [[E − V(z), −1], [1, 0]].
QuasiperiodicCocycle schrodinger_cocycle(const TrigPolynomial& v, double alpha, double energy);

/// 2d×2d companion cocycle of L_{V,α,θ} u = E u acting on (u(n+d−1), ..., u(n−d)).
/// Throws NumericError("DegenerateLeadingCoefficient") if |V_d| < 1e-14.
QuasiperiodicCocycle dual_cocycle(const TrigPolynomial& v, double alpha, double energy);

/// A_n(z) = exp(log_scale)·matrix with ‖matrix‖ in [1/2, 2].
struct TransferProduct {
  MatC matrix;
  double log_scale = 0.0;

  MatC value() const { return matrix * std::exp(log_scale); }
  double log_norm() const;
};

/// n ≥ 0: A(z+(n−1)α)···A(z). n < 0: A(z+nα)^{-1}···A(z−α)^{-1}.
/// Throws NumericError("SingularInverse") if an inverted factor has condition > 1e14.
TransferProduct transfer_product(const QuasiperiodicCocycle& c, cplx z, long n);

struct LyapunovOptions {
  long iterations = 10000;
  int samples = 64;
  std::uint64_t seed = 1;
  int reorthonormalize_every = 20;
  unsigned threads = 1;
};

struct LyapunovSpectrum {
  double epsilon = 0.0;
  std::vector<double> exponents;       // max(γ_j, 0), descending
  std::vector<double> raw_exponents;   // unclamped
  std::vector<double> partial_sums;    // L^k = γ_1 + ... + γ_k from raw exponents
  std::vector<double> partial_stderr;  // bootstrap over the θ-grid
  double stderr = 0.0;                 // max of partial_stderr
  long iterations = 0;
  int samples = 0;

  double top() const { return exponents.empty() ? 0.0 : exponents.front(); }
  double bottom() const { return exponents.empty() ? 0.0 : exponents.back(); }
};

/// The dim/2 largest exponents at strip height ε via QR-deflated products,
/// averaged over a uniform θ-grid with one seeded random offset.
LyapunovSpectrum lyapunov_spectrum(const QuasiperiodicCocycle& c, double epsilon, const LyapunovOptions& opts);

/// θ-grid used by `lyapunov_spectrum` and other averaged quantities.
std::vector<double> phase_grid(int samples, std::uint64_t seed);

struct Acceleration {
  int k = 1;
  std::vector<double> eps;
  std::vector<double> values;  // L^k(ε)
  double slope = 0.0;
  double omega_raw = 0.0;      // slope / 2π
  long omega = 0;              // nearest integer
  double residual = 0.0;       // max deviation from the affine fit (nats)
  bool non_affine = false;     // residual > 0.05
};

Acceleration acceleration(const QuasiperiodicCocycle& c, int k, const std::vector<double>& eps_grid,
                          const LyapunovOptions& opts);

struct SubcriticalRadius {
  double h = 0.0;
  double l0 = 0.0;
  bool capped = false;  // L_ε < 0.01 on the whole grid
  std::vector<double> eps;
  std::vector<double> values;
};

/// Largest ε with L_ε < 0.01, bracketed on `eps_grid` then bisected to 1e-3.
/// Throws HypothesisError("NotSubcritical") if L_0 ≥ 0.01.
SubcriticalRadius subcritical_radius(const QuasiperiodicCocycle& c, const std::vector<double>& eps_grid,
                                     const LyapunovOptions& opts);

struct RotationNumber {
  double rho = 0.0;        // folded to [0, 1/2] for Schrödinger cocycles
  double raw = 0.0;        // mod 1
  double error_bound = 0.0;
  long iterations = 0;
};

/// Birkhoff average of the lifted projective angle increment. Schrödinger
/// cocycles use their exact lift; other real cocycles use the lift centred on
/// the rotation angle of A(x), valid for cocycles close to rotations.
/// Throws HypothesisError("NotHomotopicToIdentity") when the column winding is nonzero.
RotationNumber rotation_number(const QuasiperiodicCocycle& c, long iterations, double x0 = 0.0);

/// Winding number of x ↦ A(x)e_1 around the origin over one period.
long column_winding(const QuasiperiodicCocycle& c, int grid = 2048);

/// Folds ρ mod 1 onto [0, 1/2] via ρ ↦ min(ρ, 1 − ρ).
double fold_rotation(double rho);

struct SymplecticProbe {
  double transpose_residual = 0.0;  // max ‖LᵀΩL − Ω‖
  double adjoint_residual = 0.0;    // max ‖L*ΩL − Ω‖
  std::string convention;           // "adjoint", "transpose", "both" or "none" at 1e-10
};

/// Tests both symplectic conventions for the dual cocycle at random real θ.
SymplecticProbe probe_symplectic(const TrigPolynomial& v, double alpha, double energy, int samples,
                                 std::uint64_t seed);

/// Ω = [[0, −C*], [C, 0]] with C upper triangular Toeplitz (V_d, ..., V_1).
MatC symplectic_form(const TrigPolynomial& v);

enum class Regime { kSubcritical, kCritical, kSupercritical, kUniformlyHyperbolic };

std::string to_string(Regime r);

/// Global-theory classification from L_0, the acceleration and spectrum membership.
Regime classify_regime(double l0, long omega, bool in_spectrum);

}  // namespace arclab
