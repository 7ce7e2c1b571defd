#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "arclab/common.hpp"
#include "arclab/error.hpp"
#include "arclab/operators.hpp"
#include "arclab/trig_polynomial.hpp"

namespace arclab {

/// An index set that leaves the admissible range.
class IndexOutOfRange : public Error {
 public:
  explicit IndexOutOfRange(const std::string& what) : Error("IndexOutOfRange", what, ExitCode::kConfig) {}
};

/// Sorted m-subsets of {0, ..., n−1} in lexicographic order.
std::vector<std::vector<int>> combinations(int n, int m);

/// m×m minor of `a` on the given rows and columns.
Eigen::MatrixXcd submatrix(const Eigen::MatrixXcd& a, const std::vector<int>& rows, const std::vector<int>& cols);

/// Λ^m(A) in the basis e_I = e_{i_1}∧...∧e_{i_m}, I in lexicographic order.
Eigen::MatrixXcd exterior_power(const Eigen::MatrixXcd& a, int m);

struct WedgeMinorRequest {
  int m = 1;
  std::vector<int> rows;  // i_1 < ... < i_m in [−d, d−1]
  std::vector<int> cols;  // j_1 < ... < j_m in [−d, d−1]
  long k = 0;

  /// Throws IndexOutOfRange on malformed lists.
  void validate(int d) const;
};

/// (Q_k)^{j}_{i} = ⟨δ_i, Λ^m (L)_k(θ) δ_j⟩, with δ_ℓ the coordinate of u(ℓ) in (u(d−1), ..., u(−d)).
LogDet wedge_minor_Q(const TrigPolynomial& v, double alpha, cplx theta, double energy, const WedgeMinorRequest& req);

/// det of (L_{V,α,θ} − E) restricted to the given row and column sites (no truncation of the band).
LogDet general_truncated_det(const TrigPolynomial& v, double alpha, cplx theta, double energy,
                             const std::vector<long>& row_set, const std::vector<long>& col_set);

/// Column sites [d, k−d−1] ∪ {j} ∪ ([k−d, k+d−1] \ {k+i}), sorted.
std::vector<long> th1_columns(int d, long k, const WedgeMinorRequest& req);

/// det R_{[0,k−1]}(L − E)R*_{th1_columns}.
LogDet th1_determinant(const TrigPolynomial& v, double alpha, cplx theta, double energy, const WedgeMinorRequest& req);

struct Th1Sample {
  long k = 0;
  double energy = 0.0;
  double theta = 0.0;
  cplx ratio;  // Q_k / (V_d^{−k} det)
};

struct Th1Report {
  std::vector<Th1Sample> samples;
  int skipped = 0;          // ZeroDenominator
  cplx constant;            // mean ratio
  double spread = 0.0;      // max |ratio − mean| / |mean|
  cplx parity_constant;     // mean of (−1)^{mk}·ratio
  double parity_spread = 0.0;
  bool constant_within(double tol) const { return spread <= tol; }
};

Th1Report th1_ratio_check(const TrigPolynomial& v, double alpha, const std::vector<double>& energies,
                          const std::vector<double>& thetas, const std::vector<long>& ks, WedgeMinorRequest req);

/// Roots of an analytic-in-E polynomial f of degree ≤ max_degree, from values at
/// 2(max_degree + 1) Chebyshev points on [−radius, radius] and a companion matrix.
std::vector<cplx> polynomial_roots(const std::function<cplx(double)>& f, int max_degree, double radius);

/// Hausdorff distance between finite sets in C (∞ if exactly one is empty).
double hausdorff_complex(const std::vector<cplx>& a, const std::vector<cplx>& b);

struct ZeroSetReport {
  std::vector<cplx> q_roots;
  std::vector<cplx> det_roots;
  double distance = 0.0;
};

/// Roots in E of Q_k and of the determinant at fixed θ.
ZeroSetReport zero_set_correspondence(const TrigPolynomial& v, double alpha, double theta, const WedgeMinorRequest& req);

/// Block-tridiagonal M with B on the diagonal, A above and A* below; k blocks of size d.
Eigen::MatrixXcd block_tridiagonal(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, int k);

struct BlockMinorExpansion {
  double lhs = 0.0;            // |M(i,j)|
  double rhs = 0.0;            // Σ_σ Σ_τ |det(...) μ_σ μ^τ|
  double signed_error = 0.0;   // |signed Laplace sum − M(i,j)| / max(|M(i,j)|, terms)
  int terms = 0;
  bool holds() const { return lhs <= rhs * (1 + 1e-10); }
};

/// Laplace-expansion bound for the (i, j) minor of M, with 1-based i, j.
/// Requires k0 ≥ 2, k ≥ k0 + 10, k ≥ 20, k0 d + 1 ≤ i ≤ (k0+1)d, (k−1)d + 1 ≤ j ≤ kd.
BlockMinorExpansion block_minor_expansion(const Eigen::MatrixXcd& m, int d, int k, int i, int j, int k0);

struct StructuralZeros {
  int checked = 0;
  double worst = 0.0;  // max |det| / Hadamard bound over the excluded patterns
};

/// Column subsets γ excluded by the zero-column arguments: γ leaving [(k0−2)d+1, (k0+2)d]
/// for the middle rows, and over-full σ or τ blocks for the complementary rows.
StructuralZeros structural_zero_check(const Eigen::MatrixXcd& m, int d, int k, int i, int j, int k0, int samples,
                                      std::uint64_t seed);

struct NumeratorBound {
  long x = 0;
  std::vector<long> ys;
  std::vector<double> log_mu;     // ln|μ_{x,y}|
  std::vector<double> log_bound;  // ln of the exponential bound with C = e^{εk}
  std::vector<double> log_green;  // ln|G_I(x,y)|
  double worst_margin = 0.0;      // min over y of log_bound − log_mu
  double decay_rate = 0.0;        // −slope of ln|G_I(x,y)| in |y − x|
};

/// μ_{x,y} on I = [x1, x2] against exp((Σ_{i<d}γ_i + ln|V_d| + ε)|y−x1| + (Σ_{i≤d}γ_i + ln|V_d| + ε)|y−x2| + εk),
/// k = |I|/d, for y in the interior blocks. `gammas` are the d nonnegative exponents.
NumeratorBound numerator_bound_check(const TrigPolynomial& v, double alpha, double theta, double energy, long x1,
                                     long x2, long x, double eps, const std::vector<double>& gammas);

}  // namespace arclab
