#include "arclab/operators.hpp"

#include <algorithm>
#include <random>

#include <lapacke.h>

#include "arclab/cocycle.hpp"

namespace arclab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double wrap_phase(double p) { return std::remainder(p, kTwoPi); }

lapack_complex_double* as_lapack(cplx* p) { return reinterpret_cast<lapack_complex_double*>(p); }

}  // namespace

LogDet LogDet::operator*(const LogDet& o) const {
  if (is_zero() || o.is_zero()) return {kNegInf, 0.0};
  return {log_abs + o.log_abs, wrap_phase(phase + o.phase)};
}

LogDet LogDet::operator/(const LogDet& o) const {
  if (o.is_zero()) throw NumericError("ZeroDenominator", "division by a vanishing determinant");
  if (is_zero()) return *this;
  return {log_abs - o.log_abs, wrap_phase(phase - o.phase)};
}

LogDet LogDet::negated() const { return {log_abs, wrap_phase(phase + std::numbers::pi)}; }

LogDet dense_log_det(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0) return {0.0, 0.0};
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  const auto& f = lu.matrixLU();
  LogDet out{0.0, lu.permutationP().determinant() < 0 ? std::numbers::pi : 0.0};
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    const cplx u = f(i, i);
    if (u == cplx(0.0)) return {kNegInf, 0.0};
    out.log_abs += std::log(std::abs(u));
    out.phase += std::arg(u);
  }
  out.phase = wrap_phase(out.phase);
  return out;
}

TruncatedOperator::TruncatedOperator(std::vector<cplx> band, std::vector<cplx> diagonal, long x1)
    : band_(std::move(band)), diag_(std::move(diagonal)), x1_(x1) {
  if (band_.size() % 2 == 0) throw ConfigError("band needs 2b+1 coefficients");
  if (diag_.empty()) throw ConfigError("empty interval");
  bw_ = static_cast<int>(band_.size() / 2);
}

cplx TruncatedOperator::entry(long n, long m) const {
  if (n < x1_ || n > x2() || m < x1_ || m > x2()) return 0.0;
  const long k = m - n;
  if (k < -bw_ || k > bw_) return 0.0;
  cplx v = band_[static_cast<std::size_t>(k + bw_)];
  if (k == 0) v += diag_[static_cast<std::size_t>(n - x1_)];
  return v;
}

Eigen::MatrixXcd TruncatedOperator::dense() const {
  const int n = size();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = -bw_; k <= bw_; ++k) {
      const int j = i + k;
      if (j >= 0 && j < n) m(i, j) = entry(x1_ + i, x1_ + j);
    }
  }
  return m;
}

bool TruncatedOperator::hermitian() const {
  for (const auto& f : diag_)
    if (std::abs(f.imag()) > 1e-14 * (1 + std::abs(f))) return false;
  for (int k = 0; k <= bw_; ++k) {
    const cplx a = band_[static_cast<std::size_t>(bw_ + k)], b = band_[static_cast<std::size_t>(bw_ - k)];
    if (std::abs(a - std::conj(b)) > 1e-14 * (1 + std::abs(a))) return false;
  }
  return true;
}

bool TruncatedOperator::is_real_symmetric() const {
  if (!hermitian()) return false;
  for (const auto& c : band_)
    if (c.imag() != 0.0) return false;
  return true;
}

std::vector<cplx> TruncatedOperator::lapack_band_lu_storage(cplx energy, int& ldab) const {
  const int n = size(), kl = bw_, ku = bw_;
  ldab = 2 * kl + ku + 1;
  std::vector<cplx> ab(static_cast<std::size_t>(ldab) * static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    for (int i = std::max(0, j - ku); i <= std::min(n - 1, j + kl); ++i) {
      cplx v = entry(x1_ + i, x1_ + j);
      if (i == j) v -= energy;
      ab[static_cast<std::size_t>(kl + ku + i - j) + static_cast<std::size_t>(j) * static_cast<std::size_t>(ldab)] = v;
    }
  }
  return ab;
}

LogDet TruncatedOperator::det(cplx energy) const {
  int ldab = 0;
  auto ab = lapack_band_lu_storage(energy, ldab);
  const int n = size();
  std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, bw_, bw_, as_lapack(ab.data()), ldab, ipiv.data());
  if (info < 0) throw NumericError("LapackFailure", "zgbtrf argument " + std::to_string(-info));
  if (info > 0) return {kNegInf, 0.0};
  LogDet out{0.0, 0.0};
  for (int j = 0; j < n; ++j) {
    const cplx u = ab[static_cast<std::size_t>(2 * bw_) + static_cast<std::size_t>(j) * static_cast<std::size_t>(ldab)];
    out.log_abs += std::log(std::abs(u));
    out.phase += std::arg(u);
    if (ipiv[static_cast<std::size_t>(j)] != j + 1) out.phase += std::numbers::pi;
  }
  out.phase = wrap_phase(out.phase);
  return out;
}

double TruncatedOperator::rcond(cplx energy) const {
  int ldab = 0;
  auto ab = lapack_band_lu_storage(energy, ldab);
  const int n = size();
  double anorm = 0.0;
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < ldab; ++i) s += std::abs(ab[static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * static_cast<std::size_t>(ldab)]);
    anorm = std::max(anorm, s);
  }
  std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, bw_, bw_, as_lapack(ab.data()), ldab, ipiv.data());
  if (info > 0) return 0.0;
  if (info < 0) throw NumericError("LapackFailure", "zgbtrf argument " + std::to_string(-info));
  double rc = 0.0;
  LAPACKE_zgbcon(LAPACK_COL_MAJOR, '1', n, bw_, bw_, as_lapack(ab.data()), ldab, ipiv.data(), anorm, &rc);
  return rc;
}

Eigen::MatrixXcd TruncatedOperator::solve(cplx energy, const Eigen::MatrixXcd& rhs, bool transpose) const {
  const int n = size();
  if (rhs.rows() != n) throw ConfigError("right-hand side has the wrong length");
  int ldab = 0;
  auto ab = lapack_band_lu_storage(energy, ldab);
  std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, bw_, bw_, as_lapack(ab.data()), ldab, ipiv.data());
  if (info != 0) throw NumericError("NearSingular", "section is singular at this energy");
  Eigen::MatrixXcd x = rhs;
  LAPACKE_zgbtrs(LAPACK_COL_MAJOR, transpose ? 'T' : 'N', n, bw_, bw_, static_cast<lapack_int>(x.cols()), as_lapack(ab.data()), ldab,
                 ipiv.data(), as_lapack(x.data()), n);
  return x;
}

std::vector<double> TruncatedOperator::eigenvalues() const {
  if (!hermitian()) throw ConfigError("eigenvalues need a self-adjoint section");
  const int n = size(), kd = bw_, ldab = kd + 1;
  std::vector<double> w(static_cast<std::size_t>(n));
  // Upper storage: AB(kd + i − j, j) = A(i, j) for j − kd ≤ i ≤ j.
  if (is_real_symmetric()) {
    std::vector<double> ab(static_cast<std::size_t>(ldab * n), 0.0);
    for (int j = 0; j < n; ++j)
      for (int i = std::max(0, j - kd); i <= j; ++i)
        ab[static_cast<std::size_t>(kd + i - j + j * ldab)] = entry(x1_ + i, x1_ + j).real();
    const lapack_int info = LAPACKE_dsbev(LAPACK_COL_MAJOR, 'N', 'U', n, kd, ab.data(), ldab, w.data(), nullptr, 1);
    if (info != 0) throw NumericError("LapackFailure", "dsbev info " + std::to_string(info));
  } else {
    std::vector<cplx> ab(static_cast<std::size_t>(ldab * n), 0.0);
    for (int j = 0; j < n; ++j)
      for (int i = std::max(0, j - kd); i <= j; ++i) ab[static_cast<std::size_t>(kd + i - j + j * ldab)] = entry(x1_ + i, x1_ + j);
    const lapack_int info =
        LAPACKE_zhbev(LAPACK_COL_MAJOR, 'N', 'U', n, kd, as_lapack(ab.data()), ldab, w.data(), nullptr, 1);
    if (info != 0) throw NumericError("LapackFailure", "zhbev info " + std::to_string(info));
  }
  return w;
}

Eigen::VectorXcd TruncatedOperator::eigenvector(double eigenvalue, std::uint64_t seed) const {
  const int n = size();
  int ldab = 0;
  // A shift one ulp-scale away keeps the LU nonsingular while the solve still amplifies the eigendirection.
  const double scale = 1.0 + std::abs(eigenvalue);
  auto ab = lapack_band_lu_storage(cplx(eigenvalue + 1e-13 * scale, 0.0), ldab);
  std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, bw_, bw_, as_lapack(ab.data()), ldab, ipiv.data());
  if (info < 0) throw NumericError("LapackFailure", "zgbtrf argument " + std::to_string(-info));
  if (info > 0) {
    // Exactly singular: fall back to a slightly larger shift.
    ab = lapack_band_lu_storage(cplx(eigenvalue + 1e-11 * scale, 0.0), ldab);
    LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, bw_, bw_, as_lapack(ab.data()), ldab, ipiv.data());
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXcd x(n);
  for (int i = 0; i < n; ++i) x(i) = g(rng);
  x.normalize();
  for (int it = 0; it < 3; ++it) {
    LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n, bw_, bw_, 1, as_lapack(ab.data()), ldab, ipiv.data(),
                   as_lapack(x.data()), n);
    x.normalize();
  }
  return x;
}

TruncatedOperator truncate(const TrigPolynomial& v, double alpha, cplx theta, long x1, long x2) {
  if (x2 < x1) throw ConfigError("interval must satisfy x2 >= x1");
  std::vector<cplx> band;
  for (int k = -v.degree(); k <= v.degree(); ++k) band.push_back(v.coeff(k));
  std::vector<cplx> diag;
  diag.reserve(static_cast<std::size_t>(x2 - x1 + 1));
  for (long n = x1; n <= x2; ++n) diag.push_back(2.0 * std::cos(kTwoPi * (theta + static_cast<double>(n) * alpha)));
  return TruncatedOperator(std::move(band), std::move(diag), x1);
}

TruncatedOperator truncate_schrodinger(const TrigPolynomial& v, double alpha, cplx theta, long x1, long x2) {
  if (x2 < x1) throw ConfigError("interval must satisfy x2 >= x1");
  std::vector<cplx> diag;
  diag.reserve(static_cast<std::size_t>(x2 - x1 + 1));
  for (long n = x1; n <= x2; ++n) diag.push_back(v(theta + static_cast<double>(n) * alpha));
  return TruncatedOperator({1.0, 0.0, 1.0}, std::move(diag), x1);
}

LogDet det_P(const TrigPolynomial& v, double alpha, cplx theta, double energy, long n) {
  if (n < 1) throw ConfigError("n must be at least 1");
  return truncate(v, alpha, theta, 0, n - 1).det(energy);
}

LogDet det_P_schrodinger(const TrigPolynomial& v, double alpha, cplx theta, double energy, long n) {
  if (n == 0) return {0.0, 0.0};
  if (n < 0) return {kNegInf, 0.0};
  return truncate_schrodinger(v, alpha, theta, 0, n - 1).det(energy);
}

double GreensTable::max_cramer_error() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, e.cramer_error);
  return m;
}

GreensTable greens(const TruncatedOperator& op, double energy, const std::vector<std::pair<long, long>>& pairs,
                   bool with_minors) {
  GreensTable t;
  t.x1 = op.x1();
  t.x2 = op.x2();
  t.energy = energy;
  t.rcond = op.rcond(energy);
  if (t.rcond < 1e-12) {
    throw NumericError("NearSingular", "condition number " + std::to_string(1.0 / t.rcond) + " exceeds 1e12");
  }
  t.p = op.det(energy);

  std::vector<long> cols;
  for (const auto& [x, y] : pairs) {
    if (x < t.x1 || x > t.x2 || y < t.x1 || y > t.x2) throw ConfigError("site pair outside the interval");
    if (std::find(cols.begin(), cols.end(), y) == cols.end()) cols.push_back(y);
  }
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(op.size(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) rhs(cols[c] - t.x1, static_cast<Eigen::Index>(c)) = 1.0;
  const Eigen::MatrixXcd g = op.solve(energy, rhs);

  Eigen::MatrixXcd dense;
  if (with_minors) {
    dense = op.dense();
    dense.diagonal().array() -= energy;
  }
  const int n = op.size();
  for (const auto& [x, y] : pairs) {
    const auto c = std::find(cols.begin(), cols.end(), y) - cols.begin();
    GreensEntry e{x, y, g(x - t.x1, c), {}, 0.0};
    if (with_minors) {
      const int r = static_cast<int>(y - t.x1), col = static_cast<int>(x - t.x1);
      Eigen::MatrixXcd minor(n - 1, n - 1);
      for (int i = 0, ii = 0; i < n; ++i) {
        if (i == r) continue;
        for (int j = 0, jj = 0; j < n; ++j) {
          if (j == col) continue;
          minor(ii, jj++) = dense(i, j);
        }
        ++ii;
      }
      e.mu = dense_log_det(minor);
      if ((r + col) % 2 != 0) e.mu = e.mu.negated();
      const cplx gp = e.g * t.p.value(), mu = e.mu.value();
      const double denom = std::max(std::abs(mu), std::abs(gp));
      e.cramer_error = denom > 0.0 ? std::abs(gp - mu) / denom : 0.0;
    }
    t.entries.push_back(e);
  }
  return t;
}

Eigen::VectorXcd greens_column(const TruncatedOperator& op, double energy, long y) {
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(op.size(), 1);
  rhs(y - op.x1(), 0) = 1.0;
  return op.solve(energy, rhs).col(0);
}

Eigen::VectorXcd greens_row(const TruncatedOperator& op, double energy, long x) {
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(op.size(), 1);
  rhs(x - op.x1(), 0) = 1.0;
  return op.solve(energy, rhs, true).col(0);
}

double boundary_expansion_error(const TruncatedOperator& section, double energy, const Eigen::VectorXcd& u,
                                long u_first) {
  const long x1 = section.x1(), x2 = section.x2();
  const int b = section.bandwidth();
  if (x1 - b < u_first || x2 + b >= u_first + u.size()) throw ConfigError("u does not cover the interval");
  const auto at = [&](long n) { return u(n - u_first); };
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(section.size(), 1);
  for (long y = x1; y <= x2; ++y) {
    cplx s = 0.0;
    for (int k = -b; k <= b; ++k) {
      const long m = y + k;
      if (m < x1 || m > x2) s += section.band()[static_cast<std::size_t>(k + b)] * at(m);
    }
    rhs(y - x1, 0) = -s;
  }
  const Eigen::VectorXcd w = section.solve(energy, rhs).col(0);
  double err = 0.0, scale = 0.0;
  for (long x = x1; x <= x2; ++x) {
    err = std::max(err, std::abs(w(x - x1) - at(x)));
    scale = std::max(scale, std::abs(at(x)));
  }
  return scale > 0.0 ? err / scale : err;
}

namespace {

std::vector<double> sample(int sites, int phases, const SampleOptions& opts,
                           const std::function<TruncatedOperator(double)>& build) {
  if (sites < 1 || phases < 1) throw ConfigError("sites and phases must be positive");
  std::vector<double> all;
  all.reserve(static_cast<std::size_t>(sites) * static_cast<std::size_t>(phases));
  for (int j = 0; j < phases; ++j) {
    const auto w = section_spectrum(build(static_cast<double>(j) / phases), opts);
    all.insert(all.end(), w.begin(), w.end());
  }
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

std::vector<double> section_spectrum(const TruncatedOperator& op, const SampleOptions& opts) {
  auto w = op.eigenvalues();
  if (!opts.bulk_only) return w;
  const int n = op.size();
  const int edge = static_cast<int>(opts.edge_fraction * n);
  std::vector<double> kept;
  kept.reserve(w.size());
  for (double x : w) {
    const Eigen::VectorXcd u = op.eigenvector(x);
    const double lo = u.head(edge).squaredNorm(), hi = u.tail(edge).squaredNorm();
    if (std::max(lo, hi) <= opts.edge_mass) kept.push_back(x);
  }
  return kept;
}

std::vector<double> spectrum_sample(const TrigPolynomial& v, double alpha, int sites, int phases,
                                    const SampleOptions& opts) {
  return sample(sites, phases, opts, [&](double th) { return truncate(v, alpha, cplx(th), 0, sites - 1); });
}

std::vector<double> spectrum_sample_schrodinger(const TrigPolynomial& v, double alpha, int sites, int phases,
                                                const SampleOptions& opts) {
  return sample(sites, phases, opts,
                [&](double th) { return truncate_schrodinger(v, alpha, cplx(th), 0, sites - 1); });
}

double distance_to_sample(double energy, const std::vector<double>& s) {
  if (s.empty()) return std::numeric_limits<double>::infinity();
  const auto it = std::lower_bound(s.begin(), s.end(), energy);
  double d = std::numeric_limits<double>::infinity();
  if (it != s.end()) d = *it - energy;
  if (it != s.begin()) d = std::min(d, energy - *(it - 1));
  return d;
}

double hausdorff(const std::vector<double>& a, const std::vector<double>& b) {
  double h = 0.0;
  for (double x : a) h = std::max(h, distance_to_sample(x, b));
  for (double x : b) h = std::max(h, distance_to_sample(x, a));
  return h;
}

bool in_spectrum(double energy, const std::vector<double>& sorted_sample, int sites) {
  return distance_to_sample(energy, sorted_sample) < 3.0 / sites;
}

AverageLogDet avg_log_det(const TrigPolynomial& v, double alpha, double energy, long n, double eps, int grid,
                          std::uint64_t seed, unsigned threads) {
  if (n < 1 || grid < 1) throw ConfigError("n and grid must be positive");
  const auto thetas = phase_grid(grid, seed);
  struct Item {
    double value;
    int retries;
  };
  const auto items = parallel_map<Item>(thetas.size(), threads, [&](std::size_t i) {
    LogDet p = det_P(v, alpha, cplx(thetas[i], eps), energy, n);
    int retries = 0;
    if (p.is_zero()) {
      retries = 1;
      p = det_P(v, alpha, cplx(thetas[i] + 1e-9, eps), energy, n);
      if (p.is_zero()) throw NumericError("ZeroHit", "P_n vanishes at theta = " + std::to_string(thetas[i]));
    }
    return Item{p.log_abs / static_cast<double>(n), retries};
  });
  AverageLogDet out;
  std::vector<double> values;
  for (const auto& it : items) {
    values.push_back(it.value);
    out.retries += it.retries;
  }
  out.value = ordered_sum(values) / static_cast<double>(values.size());
  out.stderr = bootstrap_stderr(values, seed);
  return out;
}

}  // namespace arclab
