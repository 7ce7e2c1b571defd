#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "arclab/common.hpp"
#include "arclab/error.hpp"
#include "arclab/trig_polynomial.hpp"

namespace arclab {

/// Determinant as ln|det| plus phase; an exact zero has log_abs = −∞.
struct LogDet {
  double log_abs = 0.0;
  double phase = 0.0;

  bool is_zero() const { return log_abs == -std::numeric_limits<double>::infinity(); }
  cplx value() const { return is_zero() ? cplx(0.0) : std::polar(std::exp(log_abs), phase); }
  LogDet operator*(const LogDet& o) const;
  LogDet operator/(const LogDet& o) const;
  LogDet negated() const;
};

/// ln-det of a dense matrix via partial-pivot LU.
LogDet dense_log_det(const Eigen::MatrixXcd& m);

/// Finite section on I = [x1, x2] of a banded operator
///   (T u)_n = Σ_{|k|≤b} c_k u_{n+k} + f(n) u_n
/// with Dirichlet truncation. The dual operator has c_k = V_k and
/// f(n) = 2cos2π(θ+nα); the Schrödinger operator has c_{±1} = 1 and f(n) = V(θ+nα).
class TruncatedOperator {
 public:
  TruncatedOperator(std::vector<cplx> band, std::vector<cplx> diagonal, long x1);

  long x1() const { return x1_; }
  long x2() const { return x1_ + size() - 1; }
  int size() const { return static_cast<int>(diag_.size()); }
  int bandwidth() const { return bw_; }

  /// Matrix entry at sites (n, m); zero outside I or the band.
  cplx entry(long n, long m) const;
  Eigen::MatrixXcd dense() const;
  /// True when all entries are real and the matrix is symmetric (θ real, V real).
  bool is_real_symmetric() const;

  /// det R_I (T − E) R_I* by banded LU with partial pivoting.
  LogDet det(cplx energy) const;

  /// Reciprocal 1-norm condition number of T − E.
  double rcond(cplx energy) const;

  /// Solves (T − E) X = B, or (T − E)ᵀ X = B; columns of B are indexed by position in I.
  Eigen::MatrixXcd solve(cplx energy, const Eigen::MatrixXcd& rhs, bool transpose = false) const;

  /// All eigenvalues, ascending. Requires a Hermitian section.
  std::vector<double> eigenvalues() const;

  /// Unit eigenvector for a computed eigenvalue, by inverse iteration on the banded LU.
  Eigen::VectorXcd eigenvector(double eigenvalue, std::uint64_t seed = 1) const;

  const std::vector<cplx>& band() const { return band_; }
  const std::vector<cplx>& diagonal() const { return diag_; }

 private:
  std::vector<cplx> band_;  // c_{-b..b}
  std::vector<cplx> diag_;  // f(x1..x2)
  long x1_;
  int bw_;

  std::vector<cplx> lapack_band_lu_storage(cplx energy, int& ldab) const;
  bool hermitian() const;
};

/// Dual operator section R_I L_{V,α,θ} R_I*, I = [x1, x2].
TruncatedOperator truncate(const TrigPolynomial& v, double alpha, cplx theta, long x1, long x2);

/// Schrödinger section R_I H_{V,α,θ} R_I* with H u = u(n+1) + u(n−1) + V(θ+nα)u(n).
TruncatedOperator truncate_schrodinger(const TrigPolynomial& v, double alpha, cplx theta, long x1, long x2);

/// P_n = det R_{[0,n−1]}(L_{V,α,θ} − E)R*_{[0,n−1]}.
LogDet det_P(const TrigPolynomial& v, double alpha, cplx theta, double energy, long n);

/// Schrödinger analogue det R_{[0,n−1]}(H_{V,α,θ} − E)R*; n = 0 gives 1, n < 0 gives 0.
LogDet det_P_schrodinger(const TrigPolynomial& v, double alpha, cplx theta, double energy, long n);

struct GreensEntry {
  long x = 0;
  long y = 0;
  cplx g;            // from the banded solve
  LogDet mu;         // (−1)^{x+y} det with row y and column x deleted
  double cramer_error = 0.0;  // |G·P − μ| / max(|μ|, |G·P|)
};

struct GreensTable {
  long x1 = 0;
  long x2 = 0;
  double energy = 0.0;
  LogDet p;          // det R_I (L − E) R_I*
  double rcond = 0.0;
  std::vector<GreensEntry> entries;

  double max_cramer_error() const;
};

/// G_I(x, y) = ⟨δ_x, (R_I(L−E)R_I*)^{-1} δ_y⟩ for the requested site pairs.
/// Throws NumericError("NearSingular") when the condition number exceeds 1e12.
GreensTable greens(const TruncatedOperator& op, double energy, const std::vector<std::pair<long, long>>& pairs,
                   bool with_minors = true);

/// Column y of the Green's function, G_I(·, y), for every site in I.
Eigen::VectorXcd greens_column(const TruncatedOperator& op, double energy, long y);

/// Row x of the Green's function, G_I(x, ·), for every site in I.
Eigen::VectorXcd greens_row(const TruncatedOperator& op, double energy, long x);

/// Max relative error of u(x) = −Σ_{y∈I} G_I(x,y) Σ_{y+k∉I} c_k u(y+k) over x ∈ I, for a
/// solution u of (T − E)u = 0 given on a window containing I and its b-neighbourhood.
/// `u` is indexed from `u_first`.
double boundary_expansion_error(const TruncatedOperator& section, double energy, const Eigen::VectorXcd& u,
                                long u_first);

/// Dirichlet sections carry boundary states whose eigenvalues sit inside spectral gaps.
/// With `bulk_only`, eigenvalues whose eigenvector puts more than half its mass on the
/// outer 10% of sites at either end are dropped.
struct SampleOptions {
  bool bulk_only = true;
  double edge_fraction = 0.1;
  double edge_mass = 0.5;
};

/// Sorted union of the section eigenvalues at phases j/phases, j = 0..phases−1, on [0, sites−1].
std::vector<double> spectrum_sample(const TrigPolynomial& v, double alpha, int sites, int phases,
                                    const SampleOptions& opts = {});
std::vector<double> spectrum_sample_schrodinger(const TrigPolynomial& v, double alpha, int sites, int phases,
                                                const SampleOptions& opts = {});

/// Eigenvalues of one section, optionally without boundary states.
std::vector<double> section_spectrum(const TruncatedOperator& op, const SampleOptions& opts);

/// Hausdorff distance between two sorted point sets on the line.
double hausdorff(const std::vector<double>& a, const std::vector<double>& b);

/// Distance from E to the nearest sample point.
double distance_to_sample(double energy, const std::vector<double>& sorted_sample);

/// dist(E, sample) < 3/sites.
bool in_spectrum(double energy, const std::vector<double>& sorted_sample, int sites);

struct AverageLogDet {
  double value = 0.0;  // grid mean of (1/n) ln|P_n(θ + iε)|
  double stderr = 0.0;
  int retries = 0;     // phases nudged by 1e-9 after an exact zero
};

/// Throws NumericError("ZeroHit") if a nudged phase still gives P_n = 0.
AverageLogDet avg_log_det(const TrigPolynomial& v, double alpha, double energy, long n, double eps, int grid,
                          std::uint64_t seed = 1, unsigned threads = 1);

}  // namespace arclab
