#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "arclab/common.hpp"
#include "arclab/error.hpp"
#include "arclab/localization.hpp"
#include "arclab/trig_polynomial.hpp"

namespace arclab {

/// f(z) = Σ_j f̂_j e^{2πijz} with finitely many modes j_min..j_max.
class AnalyticTorusFunction {
 public:
  AnalyticTorusFunction() = default;
  AnalyticTorusFunction(long j_min, std::vector<cplx> coeffs,
                        double band_limit = std::numeric_limits<double>::infinity());

  static AnalyticTorusFunction constant(cplx c);
  static AnalyticTorusFunction mode(long j, cplx c);

  /// Fourier coefficients |j| ≤ keep from samples f(k/M), k = 0..M−1.
  static AnalyticTorusFunction from_samples(const std::vector<cplx>& samples, long keep);

  long j_min() const { return j_min_; }
  long j_max() const { return j_min_ + static_cast<long>(coeffs_.size()) - 1; }
  bool empty() const { return coeffs_.empty(); }
  cplx coeff(long j) const;
  const std::vector<cplx>& coefficients() const { return coeffs_; }
  double band_limit() const { return band_limit_; }
  void set_band_limit(double r) { band_limit_ = r; }

  cplx operator()(cplx z) const;
  /// Values on the real grid k/M.
  std::vector<cplx> samples(int m) const;

  /// f(z + a).
  AnalyticTorusFunction shifted(double a) const;
  /// f*(z) = conj(f(conj z)).
  AnalyticTorusFunction reflected() const;
  /// e^{2πinz} f(z).
  AnalyticTorusFunction mode_shifted(long n) const;
  /// Drops leading and trailing coefficients with |f̂_j| ≤ tol.
  AnalyticTorusFunction trimmed(double tol = 0.0) const;

  AnalyticTorusFunction operator+(const AnalyticTorusFunction& o) const;
  AnalyticTorusFunction operator-(const AnalyticTorusFunction& o) const;
  AnalyticTorusFunction operator*(const AnalyticTorusFunction& o) const;
  AnalyticTorusFunction operator*(cplx s) const;

  /// Σ_j |f̂_j| e^{2πr|j|}.
  double fourier_bound(double r) const;

 private:
  long j_min_ = 0;
  std::vector<cplx> coeffs_;
  double band_limit_ = std::numeric_limits<double>::infinity();
};

struct StripNorm {
  double grid = 0.0;           // max of |f| over the lines Im z = ±r
  double fourier_bound = 0.0;  // Σ|f̂_j|e^{2πr|j|}
};

/// ‖f‖_r from `points` samples on each boundary line. Throws ConfigError if r exceeds the band limit.
StripNorm band_norm(const AnalyticTorusFunction& f, double r, int points = 512);

/// 2×2 matrix of torus functions.
struct TorusMatrix {
  AnalyticTorusFunction a11, a12, a21, a22;

  Eigen::Matrix2cd operator()(cplx z) const;
  AnalyticTorusFunction det() const;
};

/// sup over the lines Im z = ±r and the real line of the operator 2-norm of F.
double strip_sup(const std::function<Eigen::Matrix2cd(cplx)>& f, double r, int points = 512);

class ResonantDivisor : public Error {
 public:
  ResonantDivisor(const std::string& what, std::vector<long> modes)
      : Error("ResonantDivisor", what, ExitCode::kNumeric), modes_(std::move(modes)) {}
  const std::vector<long>& modes() const { return modes_; }

 private:
  std::vector<long> modes_;
};

struct BlochVector {
  double theta = 0.0;
  long x1 = 0;
  long x2 = 0;
  AnalyticTorusFunction u1;  // e^{2πiθ} u^I(z)
  AnalyticTorusFunction u2;  // u^I(z − α)
  AnalyticTorusFunction g;   // defect coefficients
  double residual = 0.0;     // grid max of |A_E U − e^{2πiθ}U(·+α) − (e^{2πiθ}g, 0)| / max|U|
};

/// U^I and the defect g from the coefficients u_j, j = u_first.., truncated to I = [x1, x2].
/// The identity A_E(z)U(z) − e^{2πiθ}U(z+α) = (e^{2πiθ}g(z), 0) is checked on a real grid.
BlochVector build_bloch(const TrigPolynomial& v, double alpha, double energy, const Eigen::VectorXcd& u,
                        long u_first, long x1, long x2, double theta);

struct Completion {
  TorusMatrix m;           // first column U, det ≡ 1
  double det_error = 0.0;  // max |det − 1| on the strip grid
  double floor = 0.0;      // min ‖U‖ on the strip grid
};

/// Second column (−u2*(z), u1*(z))/q(z) with q = u1u1* + u2u2*, Fourier-projected,
/// then divided by the projected determinant. Throws HypothesisError("VectorVanishes")
/// when min ‖U‖ over the r-strip grid is below 1e−10.
Completion complete_to_sl2(const AnalyticTorusFunction& u1, const AnalyticTorusFunction& u2, double r,
                           int grid = 1024);

struct OffdiagElimination {
  AnalyticTorusFunction tau;   // modes |j| < n
  AnalyticTorusFunction tail;  // modes |j| ≥ n of b
  double identity_error = 0.0; // coefficientwise max of b − e^{−2πiθ}τ(·+α) + e^{2πiθ}τ − tail
};

/// τ̂_j = −b̂_j e^{−2πiθ} / (1 − e^{−2πi(2θ − jα)}) for |j| < n. Throws ResonantDivisor.
OffdiagElimination eliminate_offdiag(const AnalyticTorusFunction& b, double theta, double alpha, long n);

struct CohomologicalSolution {
  AnalyticTorusFunction phi;
  cplx mean;
  double identity_error = 0.0;
};

/// φ(z+α) − φ(z) = φ1(z) − φ̂1_0 with φ̂_0 = 0. Throws ResonantDivisor.
CohomologicalSolution cohomological_solve(const AnalyticTorusFunction& phi1, double alpha);

/// Real conjugation W = W1/√det W1 with W1 = (S, T), S = (Ũ + Ũ*)/2, T = −(Ũ − Ũ*)/(2i),
/// Ũ = e^{πi·twist·z}U. Columns are swapped when det W1 < 0 at z = 0, flipping the target.
class RealConjugation {
 public:
  RealConjugation(AnalyticTorusFunction u1, AnalyticTorusFunction u2, long twist);

  Eigen::Matrix2cd w1(cplx z) const;
  Eigen::Matrix2cd operator()(cplx z) const;
  bool swapped() const { return swapped_; }
  long twist() const { return twist_; }
  cplx det_at_zero() const { return det0_; }

 private:
  AnalyticTorusFunction u1_, u2_, u1s_, u2s_;
  long twist_;
  bool swapped_ = false;
  cplx det0_;
};

struct Realification {
  RealConjugation w;
  double det_floor = 0.0;   // min |det W1| on the strip grid
  double det_drift = 0.0;   // max |det W − 1|
  double imag_part = 0.0;   // max |Im W| on the real axis
};

/// Throws NumericError("DeterminantVanishes") when min |det W1| on the strip is below 1e−12.
Realification realify(const AnalyticTorusFunction& u1, const AnalyticTorusFunction& u2, long twist, double r);

/// Δ arg(W(x)e_1) over x ∈ [0, 1] divided by π.
long conjugation_degree(const std::function<Eigen::Matrix2cd(cplx)>& w, int grid = 2048);

/// Dual phase θ with E an eigenvalue of the section on [−sites, sites], eigenvector peaked at 0.
/// Coarse θ scan then Newton steps with the Hellmann–Feynman derivative.
Eigenpair find_dual_phase(const TrigPolynomial& v, double alpha, double energy, int sites,
                          std::optional<double> hint = std::nullopt);

struct ReduceOptions {
  std::vector<double> radii;
  std::vector<long> scales;  // N values; windows [−⌊N/C0⌋+1, ⌊N/C0⌋−1]
  double c0 = 4.0;
  double eta = 0.0;          // recorded for the U floor margin e^{−2ηN}
  int sites = 400;
  std::optional<double> theta_hint;
  long rotation_iterations = 200000;
  double gap_edge_tol = 1e-4;
  long gap_edge_range = 100;
};

struct ConjugationReport {
  int scale = 0;
  long n = 0;                 // N
  long x1 = 0;
  long x2 = 0;
  double energy = 0.0;        // energy actually reduced
  double theta = 0.0;
  std::string branch;         // "reducible" or "parabolic"
  std::string target;         // "R_theta", "R_-theta", "parabolic"
  cplx parabolic_c;
  long resonance = 0;         // n with 2θ − nα ∈ Z on the parabolic branch
  std::vector<std::pair<double, double>> error_r;
  double error_real_grid = 0.0;    // r = 0 error on 256 real points
  std::vector<std::pair<double, double>> complex_error_r;  // U, completion and τ before realification
  long degree = 0;
  double det_floor = 0.0;
  double det_drift = 0.0;
  double g_norm = 0.0;             // ‖g‖ at the largest radius
  double bloch_residual = 0.0;
  double sl2_det_error = 0.0;
  double offdiag_tail = 0.0;
  bool cutoff_moved = false;
  double u_floor = 0.0;
  double u_floor_bound = 0.0;      // e^{−2ηN}
  double rho_energy = 0.0;         // folded ρ(E)
  double rho_predicted = 0.0;      // folded θ + deg·α/2
  double rho_mismatch = 0.0;
  std::function<Eigen::Matrix2cd(cplx)> conjugation;  // B at this scale
};

/// Gap-edge test ‖2ρ − kα‖ < tol for some |k| ≤ range; returns k.
std::optional<long> gap_edge_label(double rho, double alpha, double tol, long range);

/// The reduction pipeline at each requested scale.
std::vector<ConjugationReport> almost_reduce(const TrigPolynomial& v, double alpha, double energy,
                                             const ReduceOptions& opts);

/// max_{x} ‖(A_E)_n(x + ir)‖ for n = 1..n_max on an x-grid; returns (n, ln max) at log-spaced n and the
/// fitted slope of ln‖·‖ against ln n over [n_min, n_max].
struct NormGrowth {
  std::vector<std::pair<long, double>> samples;
  double exponent = 0.0;
};
NormGrowth norm_growth(const TrigPolynomial& v, double alpha, double energy, double r, long n_min, long n_max,
                       int grid = 16);

/// Writes Fourier coefficients of a 2×2 matrix function sampled on `grid` real points:
/// int64 j_min, j_max, rows = 2, cols = 2, then for each j the entries row-major as f64 re, im.
void dump_coefficients(const std::string& path, const std::function<Eigen::Matrix2cd(cplx)>& f, long keep,
                       int grid = 512);

}  // namespace arclab
