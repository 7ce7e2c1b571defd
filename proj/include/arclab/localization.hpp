#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "arclab/arithmetic.hpp"
#include "arclab/common.hpp"
#include "arclab/error.hpp"
#include "arclab/operators.hpp"
#include "arclab/trig_polynomial.hpp"

namespace arclab {

/// An eigenvector of a dual section, re-indexed so its peak sits at j = 0 with u_0 = 1.
struct Eigenpair {
  double energy = 0.0;
  double theta = 0.0;          // phase of the section on [−sites, sites]
  double shifted_theta = 0.0;  // θ + peak·α, the phase seen from the peak
  int sites = 0;
  long peak = 0;               // original site of the peak
  long j_min = 0;              // −sites − peak
  long j_max = 0;              // sites − peak
  Eigen::VectorXcd u;          // u(j), j = j_min..j_max
  std::vector<double> log_abs; // ln|u_j| carried past underflow
  double residual = 0.0;       // ‖(L − E)u‖ / ‖u‖

  double log_at(long j) const { return log_abs[static_cast<std::size_t>(j - j_min)]; }
  long original_site(long j) const { return j + peak; }
};

/// Eigenvalues within 10/sites of the target are candidates; the one whose eigenvector
/// peaks closest to the centre wins, ties going to the nearer energy.
/// Throws NumericError("NoEigenvalueWithin") when no eigenvalue is that close.
Eigenpair eigenpair_near(const TrigPolynomial& v, double alpha, double theta, double target, int sites);

/// ln|u_n| on the section, continuing the decaying solution from each Dirichlet end by a
/// block Riccati recursion anchored on the direct vector around `peak`.
std::vector<double> log_profile(const TruncatedOperator& op, double energy, const Eigen::VectorXcd& u, long peak);

/// Scales attached to a site j between consecutive resonances: 2sq_ℓ ≤ ζj < min(2(s+1)q_ℓ, 2q_{ℓ+1}).
struct ScaleChoice {
  double zeta = 0.0;
  int ell = 0;
  long s = 0;
  long q = 0;  // q_ℓ
  std::pair<long, long> i1;
  std::pair<long, long> i2;

  long cardinality() const { return (i1.second - i1.first + 1) + (i2.second - i2.first + 1); }
};

/// Integer bookkeeping for j > 0 with n_l, n_{l+1} consecutive resonances; `next` empty
/// means no further resonance. Returns nothing when 2q_0 > ζj or no ℓ fits.
std::optional<ScaleChoice> scale_choice(long j, long n_l, std::optional<long> next, double c0,
                                        const std::vector<long>& q);

/// Open window (lo, hi) in |j| on which decay is claimed; hi < 0 means unbounded.
struct MaskWindow {
  long n_l = 0;
  std::optional<long> n_next;
  double lo = 0.0;
  double hi = -1.0;

  bool contains(double a) const { return a > lo && (hi < 0.0 || a < hi); }
};

/// (2C0|n_l| + η|n_{l+1}|, |n_{l+1}|/(2C0)) for consecutive resonances, and (2C0|n_L|, ∞) after the last.
std::vector<MaskWindow> resonance_windows(const ResonanceSet& set, double c0, double eta);

struct WindowRate {
  MaskWindow window;
  int points = 0;
  double rate = 0.0;
};

struct LocalizationReport {
  double theta = 0.0;
  double energy = 0.0;
  int sites = 0;
  long peak = 0;
  ResonanceSet resonance_set;
  std::vector<MaskWindow> windows;
  std::vector<long> masked;       // j values used in the fit
  double masked_decay_rate = 0.0;
  double rate_stderr = 0.0;
  double predicted_rate = 0.0;    // γ_d − δ with δ the fit band, when γ_d is supplied
  std::vector<WindowRate> window_rates;
};

/// Thrown when no window survives masking; carries the report built so far.
class EmptyMask : public Error {
 public:
  explicit EmptyMask(const std::string& what) : Error("EmptyMask", what, ExitCode::kHypothesis) {}
};

/// Least-squares rate of ln|u_j| against |j| over the masked windows within the bulk
/// |original site| ≤ 0.8·sites. Resonances are taken for the shifted phase.
LocalizationReport decay_report(const Eigenpair& pair, const ResonanceSet& set, double c0, double eta,
                                const std::vector<long>& denominators, std::optional<double> gamma = std::nullopt);

struct RegularityWitness {
  bool regular = false;
  long x1 = 0;
  long x2 = 0;
  double worst = 0.0;  // max over the 2d entries of ln|G| + ξ|y − x_i| at the witness (or best failure)
};

/// Searches J = [x1, x1 + m − 1] ∋ y with |y − x_i| ≥ m/7 for one meeting the 2d boundary
/// conditions |G_J(y, x1 + j)| < e^{−ξ|y−x1|}, |G_J(y, x2 − j)| < e^{−ξ|y−x2|}.
RegularityWitness regularity_check(const TrigPolynomial& v, double alpha, double theta, double energy, long y,
                                   long m, double xi);

}  // namespace arclab
