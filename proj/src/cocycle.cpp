#include "arclab/cocycle.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace arclab {

std::string to_string(CocycleKind kind) {
  switch (kind) {
    case CocycleKind::kSchrodinger: return "schrodinger";
    case CocycleKind::kDualFiniteRange: return "dual";
    case CocycleKind::kGeneric: return "generic";
  }
  return "unknown";
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::kSubcritical: return "subcritical";
    case Regime::kCritical: return "critical";
    case Regime::kSupercritical: return "supercritical";
    case Regime::kUniformlyHyperbolic: return "uh";
  }
  return "unknown";
}

QuasiperiodicCocycle::QuasiperiodicCocycle(CocycleKind kind, double alpha, MatC constant,
                                           std::vector<FourierEntry> entries)
    : kind_(kind), alpha_(alpha), constant_(std::move(constant)), entries_(std::move(entries)) {
  if (constant_.rows() != constant_.cols() || constant_.rows() == 0) {
    throw ConfigError("cocycle matrix must be square and nonempty");
  }
  for (const auto& e : entries_) {
    if (e.row < 0 || e.col < 0 || e.row >= constant_.rows() || e.col >= constant_.cols()) {
      throw ConfigError("Fourier entry outside the matrix");
    }
    max_mode_ = std::max(max_mode_, std::labs(e.mode));
  }
}

QuasiperiodicCocycle QuasiperiodicCocycle::generic(double alpha, const std::vector<long>& modes,
                                                   const std::vector<MatC>& matrices) {
  if (modes.size() != matrices.size() || matrices.empty()) throw ConfigError("need one matrix per mode");
  const auto n = matrices.front().rows();
  MatC constant = MatC::Zero(n, n);
  std::vector<FourierEntry> entries;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const MatC& m = matrices[i];
    if (m.rows() != n || m.cols() != n) throw ConfigError("Fourier matrices differ in size");
    if (modes[i] == 0) {
      constant += m;
      continue;
    }
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        if (m(r, c) != cplx(0.0)) entries.push_back({modes[i], r, c, m(r, c)});
      }
    }
  }
  return QuasiperiodicCocycle(CocycleKind::kGeneric, alpha, std::move(constant), std::move(entries));
}

MatC QuasiperiodicCocycle::operator()(cplx z) const {
  MatC out;
  evaluate(z, out);
  return out;
}

QuasiperiodicCocycle schrodinger_cocycle(const TrigPolynomial& v, double alpha, double energy) {
  MatC a(2, 2);
  a << energy - v.coeff(0), -1.0, 1.0, 0.0;
  std::vector<QuasiperiodicCocycle::FourierEntry> entries;
  for (int k = -v.degree(); k <= v.degree(); ++k) {
    if (k != 0 && v.coeff(k) != cplx(0.0)) entries.push_back({k, 0, 0, -v.coeff(k)});
  }
  return QuasiperiodicCocycle(CocycleKind::kSchrodinger, alpha, std::move(a), std::move(entries));
}

QuasiperiodicCocycle dual_cocycle(const TrigPolynomial& v, double alpha, double energy) {
  const int d = v.degree();
  if (d < 1 || std::abs(v.leading()) < 1e-14) {
    throw NumericError("DegenerateLeadingCoefficient", "|V_d| < 1e-14");
  }
  const cplx vd = v.leading();
  MatC a = MatC::Zero(2 * d, 2 * d);
  // Position p holds u(n + d − 1 − p).
  for (int p = 0; p < 2 * d; ++p) {
    const int off = d - 1 - p;
    a(0, p) = off == 0 ? (energy - v.coeff(0)) / vd : -v.coeff(off) / vd;
  }
  for (int p = 1; p < 2 * d; ++p) a(p, p - 1) = 1.0;
  std::vector<QuasiperiodicCocycle::FourierEntry> entries = {{1, 0, d - 1, -1.0 / vd},
                                                             {-1, 0, d - 1, -1.0 / vd}};
  return QuasiperiodicCocycle(CocycleKind::kDualFiniteRange, alpha, std::move(a), std::move(entries));
}

double TransferProduct::log_norm() const {
  if (matrix.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatC> svd(matrix);
  return std::log(svd.singularValues()(0)) + log_scale;
}

namespace {

void renormalize(MatC& m, double& log_scale) {
  const double n = m.norm();
  if (n == 0.0) return;
  if (n > 2.0 || n < 0.5) {
    m /= n;
    log_scale += std::log(n);
  }
}

}  // namespace

TransferProduct transfer_product(const QuasiperiodicCocycle& c, cplx z, long n) {
  const int dim = c.dimension();
  TransferProduct out{MatC::Identity(dim, dim), 0.0};
  const double alpha = c.frequency();
  MatC a;
  if (n >= 0) {
    for (long j = 0; j < n; ++j) {
      c.evaluate(z + static_cast<double>(j) * alpha, a);
      out.matrix = a * out.matrix;
      renormalize(out.matrix, out.log_scale);
    }
    return out;
  }
  for (long j = 1; j <= -n; ++j) {
    c.evaluate(z - static_cast<double>(j) * alpha, a);
    Eigen::JacobiSVD<MatC> svd(a);
    const auto& s = svd.singularValues();
    if (s(dim - 1) == 0.0 || s(0) / s(dim - 1) > 1e14) {
      throw NumericError("SingularInverse", "factor at z - " + std::to_string(j) + "α is numerically singular");
    }
    out.matrix = a.inverse() * out.matrix;
    renormalize(out.matrix, out.log_scale);
  }
  return out;
}

std::vector<double> phase_grid(int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double offset = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  std::vector<double> grid(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) grid[static_cast<std::size_t>(i)] = (i + offset) / samples;
  return grid;
}

namespace {

// Sums of log|R_ii| along one orbit, one entry per tracked direction.
template <int D>
std::vector<double> qr_log_growth(const QuasiperiodicCocycle& c, cplx z0, long iterations, int every,
                                  std::uint64_t start_seed) {
  using Mat = Eigen::Matrix<cplx, D, D>;
  using Frame = Eigen::Matrix<cplx, D, Eigen::Dynamic>;
  const int dim = c.dimension();
  const int m = dim / 2 > 0 ? dim / 2 : 1;

  std::mt19937_64 rng(start_seed);
  std::normal_distribution<double> gauss;
  Frame q(dim, m);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < m; ++j) q(i, j) = cplx(gauss(rng), gauss(rng));
  {
    Eigen::HouseholderQR<Frame> qr(q);
    q = qr.householderQ() * Frame::Identity(dim, m);
  }

  std::vector<double> logs(static_cast<std::size_t>(m), 0.0);
  const cplx step = std::exp(cplx(0.0, kTwoPi * c.frequency()));
  cplx w = std::exp(cplx(0.0, kTwoPi) * z0);
  Mat a(dim, dim);
  const auto orthonormalize = [&] {
    Eigen::HouseholderQR<Frame> qr(q);
    const auto& r = qr.matrixQR();
    for (int j = 0; j < m; ++j) logs[static_cast<std::size_t>(j)] += std::log(std::abs(r(j, j)));
    q = qr.householderQ() * Frame::Identity(dim, m);
  };
  for (long n = 0; n < iterations; ++n) {
    if (n % 1024 == 0) w = std::exp(cplx(0.0, kTwoPi) * (z0 + static_cast<double>(n) * c.frequency()));
    c.evaluate_w(w, a);
    q = a * q;
    w *= step;
    if ((n + 1) % every == 0) orthonormalize();
  }
  if (iterations % every != 0) orthonormalize();
  return logs;
}

std::vector<double> orbit_growth(const QuasiperiodicCocycle& c, cplx z0, long iterations, int every,
                                 std::uint64_t seed) {
  switch (c.dimension()) {
    case 2: return qr_log_growth<2>(c, z0, iterations, every, seed);
    case 4: return qr_log_growth<4>(c, z0, iterations, every, seed);
    case 6: return qr_log_growth<6>(c, z0, iterations, every, seed);
    default: return qr_log_growth<Eigen::Dynamic>(c, z0, iterations, every, seed);
  }
}

}  // namespace

LyapunovSpectrum lyapunov_spectrum(const QuasiperiodicCocycle& c, double epsilon, const LyapunovOptions& opts) {
  if (opts.iterations < 1 || opts.samples < 1) throw ConfigError("iterations and samples must be positive");
  if (opts.reorthonormalize_every < 1) throw ConfigError("re-orthonormalization cadence must be positive");
  const auto grid = phase_grid(opts.samples, opts.seed);
  const int m = std::max(1, c.dimension() / 2);

  const auto per_sample = parallel_map<std::vector<double>>(
      grid.size(), opts.threads, [&](std::size_t i) {
        auto logs = orbit_growth(c, cplx(grid[i], epsilon), opts.iterations, opts.reorthonormalize_every,
                                 opts.seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
        for (auto& v : logs) v /= static_cast<double>(opts.iterations);
        std::sort(logs.begin(), logs.end(), std::greater<>());
        return logs;
      });

  LyapunovSpectrum out;
  out.epsilon = epsilon;
  out.iterations = opts.iterations;
  out.samples = opts.samples;
  out.raw_exponents.assign(static_cast<std::size_t>(m), 0.0);
  for (const auto& s : per_sample)
    for (int j = 0; j < m; ++j) out.raw_exponents[static_cast<std::size_t>(j)] += s[static_cast<std::size_t>(j)];
  for (auto& v : out.raw_exponents) v /= static_cast<double>(per_sample.size());

  for (double g : out.raw_exponents) out.exponents.push_back(std::max(g, 0.0));
  double acc = 0.0;
  for (int k = 0; k < m; ++k) {
    acc += out.raw_exponents[static_cast<std::size_t>(k)];
    out.partial_sums.push_back(acc);
    std::vector<double> sums;
    sums.reserve(per_sample.size());
    for (const auto& s : per_sample) {
      sums.push_back(std::accumulate(s.begin(), s.begin() + k + 1, 0.0));
    }
    out.partial_stderr.push_back(bootstrap_stderr(sums, opts.seed + static_cast<std::uint64_t>(k)));
  }
  out.stderr = *std::max_element(out.partial_stderr.begin(), out.partial_stderr.end());
  return out;
}

Acceleration acceleration(const QuasiperiodicCocycle& c, int k, const std::vector<double>& eps_grid,
                          const LyapunovOptions& opts) {
  const int m = std::max(1, c.dimension() / 2);
  if (k < 1 || k > m) throw ConfigError("exterior index k must lie in 1.." + std::to_string(m));
  if (eps_grid.size() < 3) throw ConfigError("acceleration needs at least 3 heights");
  Acceleration out;
  out.k = k;
  out.eps = eps_grid;
  for (double e : eps_grid) {
    const auto s = lyapunov_spectrum(c, e, opts);
    out.values.push_back(std::max(s.partial_sums[static_cast<std::size_t>(k - 1)], 0.0));
  }
  const auto fit = fit_line(out.eps, out.values);
  out.slope = fit.slope;
  out.omega_raw = fit.slope / kTwoPi;
  out.omega = std::lround(out.omega_raw);
  out.residual = fit.max_residual;
  out.non_affine = fit.max_residual > 0.05;
  return out;
}

SubcriticalRadius subcritical_radius(const QuasiperiodicCocycle& c, const std::vector<double>& eps_grid,
                                     const LyapunovOptions& opts) {
  constexpr double kZero = 0.01;
  if (eps_grid.empty()) throw ConfigError("empty height grid");
  std::vector<double> grid = eps_grid;
  std::sort(grid.begin(), grid.end());
  const auto top = [&](double e) { return lyapunov_spectrum(c, e, opts).top(); };

  SubcriticalRadius out;
  out.l0 = top(0.0);
  if (out.l0 >= kZero) {
    throw HypothesisError("NotSubcritical", "L_0 = " + std::to_string(out.l0) + " >= 0.01");
  }
  double lo = 0.0, hi = -1.0;
  for (double e : grid) {
    const double v = top(e);
    out.eps.push_back(e);
    out.values.push_back(v);
    if (v < kZero) {
      lo = e;
    } else {
      hi = e;
      break;
    }
  }
  if (hi < 0.0) {
    out.capped = true;
    out.h = lo;
    return out;
  }
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    (top(mid) < kZero ? lo : hi) = mid;
  }
  out.h = 0.5 * (lo + hi);
  return out;
}

double fold_rotation(double rho) {
  const double r = mod1(rho);
  return std::min(r, 1.0 - r);
}

long column_winding(const QuasiperiodicCocycle& c, int grid) {
  double total = 0.0;
  MatC a;
  c.evaluate(cplx(0.0), a);
  double prev = std::atan2(a(1, 0).real(), a(0, 0).real());
  for (int i = 1; i <= grid; ++i) {
    c.evaluate(cplx(static_cast<double>(i) / grid), a);
    const double cur = std::atan2(a(1, 0).real(), a(0, 0).real());
    double d = cur - prev;
    d -= kTwoPi * std::round(d / kTwoPi);
    total += d;
    prev = cur;
  }
  return std::lround(total / kTwoPi);
}

namespace {

double principal_half(double x) {
  // Representative of x modulo π in (−π/2, π/2].
  double r = x - std::numbers::pi * std::floor(x / std::numbers::pi + 0.5);
  if (r <= -std::numbers::pi / 2) r += std::numbers::pi;
  return r;
}

}  // namespace

RotationNumber rotation_number(const QuasiperiodicCocycle& c, long iterations, double x0) {
  if (c.dimension() != 2) throw ConfigError("rotation number needs a 2x2 cocycle");
  if (iterations < 1) throw ConfigError("iterations must be positive");
  if (c.kind() != CocycleKind::kSchrodinger && column_winding(c) != 0) {
    throw HypothesisError("NotHomotopicToIdentity", "column of A winds around the origin");
  }
  const double alpha = c.frequency();
  Eigen::Matrix2cd a;
  double phi = std::numbers::pi / 2 - 0.1234;  // projective angle in (−π/2, π/2]
  double total = 0.0;
  for (long n = 0; n < iterations; ++n) {
    c.evaluate(cplx(x0 + static_cast<double>(n) * alpha, 0.0), a);
    const double a11 = a(0, 0).real(), a12 = a(0, 1).real();
    const double a21 = a(1, 0).real(), a22 = a(1, 1).real();
    const double cx = std::cos(phi), sy = std::sin(phi);
    const double px = a11 * cx + a12 * sy, py = a21 * cx + a22 * sy;
    double inc;
    if (c.kind() == CocycleKind::kSchrodinger) {
      // A(cos φ, sin φ) = (a cos φ − sin φ, cos φ): the image stays in the closed upper half plane.
      const double psi = std::atan2(py, px);
      inc = psi - phi;
    } else {
      const double center = std::atan2(a21 - a12, a11 + a22);
      const double delta = std::atan2(py, px) - phi;
      inc = center + principal_half(delta - center);
    }
    total += inc;
    phi = principal_half(phi + inc);
  }
  RotationNumber out;
  out.iterations = iterations;
  out.raw = mod1(total / (kTwoPi * static_cast<double>(iterations)));
  out.rho = c.kind() == CocycleKind::kSchrodinger ? fold_rotation(out.raw) : out.raw;
  out.error_bound = 1.0 / static_cast<double>(iterations);
  return out;
}

MatC symplectic_form(const TrigPolynomial& v) {
  const int d = v.degree();
  MatC cm = MatC::Zero(d, d);
  for (int r = 0; r < d; ++r)
    for (int col = r; col < d; ++col) cm(r, col) = v.coeff(d - (col - r));
  MatC omega = MatC::Zero(2 * d, 2 * d);
  omega.topRightCorner(d, d) = -cm.adjoint();
  omega.bottomLeftCorner(d, d) = cm;
  return omega;
}

SymplecticProbe probe_symplectic(const TrigPolynomial& v, double alpha, double energy, int samples,
                                 std::uint64_t seed) {
  const auto c = dual_cocycle(v, alpha, energy);
  const MatC omega = symplectic_form(v);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  SymplecticProbe out;
  const double scale = std::max(1.0, omega.cwiseAbs().maxCoeff());
  for (int i = 0; i < samples; ++i) {
    const MatC l = c(cplx(unif(rng), 0.0));
    out.transpose_residual =
        std::max(out.transpose_residual, (l.transpose() * omega * l - omega).cwiseAbs().maxCoeff() / scale);
    out.adjoint_residual =
        std::max(out.adjoint_residual, (l.adjoint() * omega * l - omega).cwiseAbs().maxCoeff() / scale);
  }
  const bool t = out.transpose_residual <= 1e-10, a = out.adjoint_residual <= 1e-10;
  out.convention = t && a ? "both" : a ? "adjoint" : t ? "transpose" : "none";
  return out;
}

Regime classify_regime(double l0, long omega, bool in_spectrum) {
  if (!in_spectrum) return Regime::kUniformlyHyperbolic;
  if (l0 >= 0.01) return Regime::kSupercritical;
  return omega == 0 ? Regime::kSubcritical : Regime::kCritical;
}

}  // namespace arclab
