#include "arclab/reducibility.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <unsupported/Eigen/FFT>

#include "arclab/cocycle.hpp"

namespace arclab {

// ---------------------------------------------------------------- torus functions

AnalyticTorusFunction::AnalyticTorusFunction(long j_min, std::vector<cplx> coeffs, double band_limit)
    : j_min_(j_min), coeffs_(std::move(coeffs)), band_limit_(band_limit) {}

AnalyticTorusFunction AnalyticTorusFunction::constant(cplx c) { return {0, {c}}; }

AnalyticTorusFunction AnalyticTorusFunction::mode(long j, cplx c) { return {j, {c}}; }

AnalyticTorusFunction AnalyticTorusFunction::from_samples(const std::vector<cplx>& samples, long keep) {
  const auto m = static_cast<long>(samples.size());
  if (2 * keep + 1 > m) throw ConfigError("too few samples for the requested modes");
  Eigen::FFT<double> fft;
  std::vector<cplx> freq;
  fft.fwd(freq, samples);
  std::vector<cplx> c(static_cast<std::size_t>(2 * keep + 1));
  for (long j = -keep; j <= keep; ++j)
    c[static_cast<std::size_t>(j + keep)] = freq[static_cast<std::size_t>((j + m) % m)] / static_cast<double>(m);
  return {-keep, std::move(c)};
}

cplx AnalyticTorusFunction::coeff(long j) const {
  if (coeffs_.empty() || j < j_min_ || j > j_max()) return 0.0;
  return coeffs_[static_cast<std::size_t>(j - j_min_)];
}

cplx AnalyticTorusFunction::operator()(cplx z) const {
  if (coeffs_.empty()) return 0.0;
  const cplx w = std::exp(cplx(0.0, kTwoPi) * z);
  cplx acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * w + *it;
  return acc * fourier_mode(j_min_, z);
}

std::vector<cplx> AnalyticTorusFunction::samples(int m) const {
  std::vector<cplx> out(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) out[static_cast<std::size_t>(k)] = (*this)(cplx(static_cast<double>(k) / m, 0.0));
  return out;
}

AnalyticTorusFunction AnalyticTorusFunction::shifted(double a) const {
  auto out = *this;
  for (std::size_t t = 0; t < coeffs_.size(); ++t)
    out.coeffs_[t] *= expi(kTwoPi * static_cast<double>(j_min_ + static_cast<long>(t)) * a);
  return out;
}

AnalyticTorusFunction AnalyticTorusFunction::reflected() const {
  std::vector<cplx> c(coeffs_.rbegin(), coeffs_.rend());
  for (auto& x : c) x = std::conj(x);
  return {-j_max(), std::move(c), band_limit_};
}

AnalyticTorusFunction AnalyticTorusFunction::mode_shifted(long n) const {
  auto out = *this;
  out.j_min_ += n;
  return out;
}

AnalyticTorusFunction AnalyticTorusFunction::trimmed(double tol) const {
  std::size_t lo = 0, hi = coeffs_.size();
  while (lo < hi && std::abs(coeffs_[lo]) <= tol) ++lo;
  while (hi > lo && std::abs(coeffs_[hi - 1]) <= tol) --hi;
  return {j_min_ + static_cast<long>(lo), std::vector<cplx>(coeffs_.begin() + static_cast<long>(lo),
                                                           coeffs_.begin() + static_cast<long>(hi)),
          band_limit_};
}

AnalyticTorusFunction AnalyticTorusFunction::operator+(const AnalyticTorusFunction& o) const {
  if (empty()) return o;
  if (o.empty()) return *this;
  const long lo = std::min(j_min_, o.j_min_), hi = std::max(j_max(), o.j_max());
  std::vector<cplx> c(static_cast<std::size_t>(hi - lo + 1));
  for (long j = lo; j <= hi; ++j) c[static_cast<std::size_t>(j - lo)] = coeff(j) + o.coeff(j);
  return {lo, std::move(c), std::min(band_limit_, o.band_limit_)};
}

AnalyticTorusFunction AnalyticTorusFunction::operator-(const AnalyticTorusFunction& o) const {
  return *this + o * cplx(-1.0);
}

AnalyticTorusFunction AnalyticTorusFunction::operator*(const AnalyticTorusFunction& o) const {
  if (empty() || o.empty()) return {};
  std::vector<cplx> c(coeffs_.size() + o.coeffs_.size() - 1, 0.0);
  for (std::size_t a = 0; a < coeffs_.size(); ++a) {
    if (coeffs_[a] == 0.0) continue;
    for (std::size_t b = 0; b < o.coeffs_.size(); ++b) c[a + b] += coeffs_[a] * o.coeffs_[b];
  }
  return {j_min_ + o.j_min_, std::move(c), std::min(band_limit_, o.band_limit_)};
}

AnalyticTorusFunction AnalyticTorusFunction::operator*(cplx s) const {
  auto out = *this;
  for (auto& x : out.coeffs_) x *= s;
  return out;
}

double AnalyticTorusFunction::fourier_bound(double r) const {
  double s = 0.0;
  for (std::size_t t = 0; t < coeffs_.size(); ++t)
    s += std::abs(coeffs_[t]) * std::exp(kTwoPi * r * std::fabs(static_cast<double>(j_min_ + static_cast<long>(t))));
  return s;
}

StripNorm band_norm(const AnalyticTorusFunction& f, double r, int points) {
  if (r < 0.0 || r > f.band_limit()) throw ConfigError("strip height outside the band limit");
  StripNorm out;
  for (double y : {-r, r})
    for (int k = 0; k < points; ++k)
      out.grid = std::max(out.grid, std::abs(f(cplx(static_cast<double>(k) / points, y))));
  out.fourier_bound = f.fourier_bound(r);
  return out;
}

Eigen::Matrix2cd TorusMatrix::operator()(cplx z) const {
  Eigen::Matrix2cd m;
  m << a11(z), a12(z), a21(z), a22(z);
  return m;
}

AnalyticTorusFunction TorusMatrix::det() const { return a11 * a22 - a12 * a21; }

namespace {

// Zeroes coefficients at the FFT noise level so they are not amplified off the real axis.
AnalyticTorusFunction denoised(const AnalyticTorusFunction& f, double rel = 1e-13) {
  double top = 0.0;
  for (const auto& c : f.coefficients()) top = std::max(top, std::abs(c));
  std::vector<cplx> c = f.coefficients();
  for (auto& x : c)
    if (std::abs(x) <= rel * top) x = 0.0;
  return AnalyticTorusFunction(f.j_min(), std::move(c), f.band_limit()).trimmed();
}

template <class F>
void for_strip(double r, int points, F&& f) {
  const std::vector<double> heights = r > 0.0 ? std::vector<double>{-r, 0.0, r} : std::vector<double>{0.0};
  for (double y : heights)
    for (int k = 0; k < points; ++k) f(cplx(static_cast<double>(k) / points, y));
}

double op_norm(const Eigen::Matrix2cd& m) {
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(m);
  return svd.singularValues()(0);
}

Eigen::Matrix2cd schrodinger_at(const TrigPolynomial& v, double energy, cplx z) {
  Eigen::Matrix2cd a;
  a << energy - v(z), -1.0, 1.0, 0.0;
  return a;
}

AnalyticTorusFunction energy_minus_v(const TrigPolynomial& v, double energy) {
  const int d = v.degree();
  std::vector<cplx> c(static_cast<std::size_t>(2 * d + 1));
  for (int k = -d; k <= d; ++k) c[static_cast<std::size_t>(k + d)] = -v.coeff(k);
  c[static_cast<std::size_t>(d)] += energy;
  return {-d, std::move(c)};
}

}  // namespace

double strip_sup(const std::function<Eigen::Matrix2cd(cplx)>& f, double r, int points) {
  double best = 0.0;
  for_strip(r, points, [&](cplx z) { best = std::max(best, op_norm(f(z))); });
  return best;
}

// ---------------------------------------------------------------- Bloch vector

BlochVector build_bloch(const TrigPolynomial& v, double alpha, double energy, const Eigen::VectorXcd& u,
                        long u_first, long x1, long x2, double theta) {
  const int d = v.degree();
  const long u_last = u_first + static_cast<long>(u.size()) - 1;
  if (x2 < x1) throw ConfigError("window must satisfy x2 >= x1");
  if (x1 - 2 * d < u_first || x2 + 2 * d > u_last) throw ConfigError("eigenvector does not cover the window");
  const auto at = [&](long j) { return (j < u_first || j > u_last) ? cplx(0.0) : u(j - u_first); };
  const auto outside = [&](long j) { return j < x1 || j > x2; };

  std::vector<cplx> ui;
  for (long j = x1; j <= x2; ++j) ui.push_back(at(j));
  const AnalyticTorusFunction u_i(x1, ui);

  BlochVector out;
  out.theta = theta;
  out.x1 = x1;
  out.x2 = x2;
  const cplx phase = expi(kTwoPi * theta);
  out.u1 = u_i * phase;
  out.u2 = u_i.shifted(-alpha);

  // Beyond [x1 − d, x2 + d] the coefficients vanish by the eigenvalue equation.
  std::vector<cplx> g;
  for (long j = x1 - d; j <= x2 + d; ++j) {
    cplx s = 0.0;
    if (outside(j)) s -= (energy - 2.0 * std::cos(kTwoPi * (theta + static_cast<double>(j) * alpha))) * at(j);
    for (int k = -d; k <= d; ++k)
      if (outside(j - k)) s += at(j - k) * v.coeff(k);
    g.push_back(s);
  }
  out.g = AnalyticTorusFunction(x1 - d, g);

  double scale = 0.0, worst = 0.0;
  for (int k = 0; k < 256; ++k) {
    const cplx z(static_cast<double>(k) / 256, 0.0);
    const Eigen::Vector2cd uz(out.u1(z), out.u2(z));
    const Eigen::Vector2cd up(out.u1(z + alpha), out.u2(z + alpha));
    const Eigen::Vector2cd res = schrodinger_at(v, energy, z) * uz - phase * up - Eigen::Vector2cd(phase * out.g(z), 0.0);
    scale = std::max(scale, uz.norm());
    worst = std::max(worst, res.norm());
  }
  out.residual = scale > 0.0 ? worst / scale : worst;
  return out;
}

// ---------------------------------------------------------------- completion

Completion complete_to_sl2(const AnalyticTorusFunction& u1, const AnalyticTorusFunction& u2, double r, int grid) {
  Completion out;
  out.floor = std::numeric_limits<double>::infinity();
  for_strip(r, 512, [&](cplx z) { out.floor = std::min(out.floor, std::hypot(std::abs(u1(z)), std::abs(u2(z)))); });
  if (out.floor < 1e-10) {
    throw HypothesisError("VectorVanishes", "min |U| on the strip is " + std::to_string(out.floor));
  }
  const auto u1s = u1.reflected(), u2s = u2.reflected();
  const auto q = (u1 * u1s + u2 * u2s).samples(grid);
  const auto a = u1s.samples(grid), b = u2s.samples(grid);
  const long keep = grid / 4;
  std::vector<cplx> w1(static_cast<std::size_t>(grid)), w2(static_cast<std::size_t>(grid));
  for (int k = 0; k < grid; ++k) {
    w1[static_cast<std::size_t>(k)] = -b[static_cast<std::size_t>(k)] / q[static_cast<std::size_t>(k)];
    w2[static_cast<std::size_t>(k)] = a[static_cast<std::size_t>(k)] / q[static_cast<std::size_t>(k)];
  }
  auto f1 = denoised(AnalyticTorusFunction::from_samples(w1, keep));
  auto f2 = denoised(AnalyticTorusFunction::from_samples(w2, keep));
  // Divide out the determinant left by the projection.
  const auto det = (u1 * f2 - u2 * f1).samples(grid);
  const auto s1 = f1.samples(grid), s2 = f2.samples(grid);
  for (int k = 0; k < grid; ++k) {
    w1[static_cast<std::size_t>(k)] = s1[static_cast<std::size_t>(k)] / det[static_cast<std::size_t>(k)];
    w2[static_cast<std::size_t>(k)] = s2[static_cast<std::size_t>(k)] / det[static_cast<std::size_t>(k)];
  }
  f1 = denoised(AnalyticTorusFunction::from_samples(w1, keep));
  f2 = denoised(AnalyticTorusFunction::from_samples(w2, keep));
  f1.set_band_limit(r);
  f2.set_band_limit(r);
  out.m = TorusMatrix{u1, f1, u2, f2};
  for_strip(r, 512, [&](cplx z) {
    out.det_error = std::max(out.det_error, std::abs(u1(z) * f2(z) - u2(z) * f1(z) - 1.0));
  });
  return out;
}

// ---------------------------------------------------------------- small divisors

OffdiagElimination eliminate_offdiag(const AnalyticTorusFunction& b, double theta, double alpha, long n) {
  if (n < 1) throw ConfigError("cutoff must be positive");
  std::vector<long> bad;
  std::vector<cplx> tau(static_cast<std::size_t>(2 * n - 1), 0.0);
  std::vector<cplx> tail;
  const cplx e_theta = expi(-kTwoPi * theta);
  for (long j = -(n - 1); j <= n - 1; ++j) {
    const cplx div = 1.0 - expi(-kTwoPi * (2.0 * theta - static_cast<double>(j) * alpha));
    if (std::abs(div) <= 1e-12) {
      bad.push_back(j);
      continue;
    }
    tau[static_cast<std::size_t>(j + n - 1)] = -b.coeff(j) * e_theta / div;
  }
  if (!bad.empty()) throw ResonantDivisor("resonant divisor below the cutoff", bad);

  OffdiagElimination out;
  out.tau = AnalyticTorusFunction(-(n - 1), tau);
  if (!b.empty()) {
    std::vector<cplx> t;
    for (long j = b.j_min(); j <= b.j_max(); ++j) t.push_back(std::labs(j) >= n ? b.coeff(j) : cplx(0.0));
    out.tail = AnalyticTorusFunction(b.j_min(), t);
  }
  const auto lhs = b - out.tau.shifted(alpha) * e_theta + out.tau * std::conj(e_theta) - out.tail;
  for (const auto& c : lhs.coefficients()) out.identity_error = std::max(out.identity_error, std::abs(c));
  return out;
}

CohomologicalSolution cohomological_solve(const AnalyticTorusFunction& phi1, double alpha) {
  CohomologicalSolution out;
  out.mean = phi1.coeff(0);
  if (phi1.empty()) {
    out.phi = AnalyticTorusFunction::constant(0.0);
    return out;
  }
  std::vector<long> bad;
  std::vector<cplx> c;
  for (long j = phi1.j_min(); j <= phi1.j_max(); ++j) {
    if (j == 0) {
      c.push_back(0.0);
      continue;
    }
    const cplx div = expi(kTwoPi * static_cast<double>(j) * alpha) - 1.0;
    if (std::abs(div) <= 1e-12) {
      bad.push_back(j);
      c.push_back(0.0);
      continue;
    }
    c.push_back(phi1.coeff(j) / div);
  }
  if (!bad.empty()) throw ResonantDivisor("resonant divisor in the cohomological equation", bad);
  out.phi = AnalyticTorusFunction(phi1.j_min(), c);
  const auto lhs = out.phi.shifted(alpha) - out.phi - phi1 + AnalyticTorusFunction::constant(out.mean);
  for (const auto& x : lhs.coefficients()) out.identity_error = std::max(out.identity_error, std::abs(x));
  return out;
}

// ---------------------------------------------------------------- realification

RealConjugation::RealConjugation(AnalyticTorusFunction u1, AnalyticTorusFunction u2, long twist)
    : u1_(std::move(u1)), u2_(std::move(u2)), twist_(twist) {
  u1s_ = u1_.reflected();
  u2s_ = u2_.reflected();
  det0_ = w1(0.0).determinant();
  if (det0_.real() < 0.0) {
    swapped_ = true;
    det0_ = -det0_;
  }
}

Eigen::Matrix2cd RealConjugation::w1(cplx z) const {
  const cplx tw = std::exp(cplx(0.0, std::numbers::pi * static_cast<double>(twist_)) * z);
  const Eigen::Vector2cd ut(tw * u1_(z), tw * u2_(z));
  const Eigen::Vector2cd us(u1s_(z) / tw, u2s_(z) / tw);
  const Eigen::Vector2cd s = (ut + us) / 2.0;
  const Eigen::Vector2cd t = -(ut - us) / cplx(0.0, 2.0);
  Eigen::Matrix2cd m;
  if (swapped_) {
    m.col(0) = t;
    m.col(1) = s;
  } else {
    m.col(0) = s;
    m.col(1) = t;
  }
  return m;
}

Eigen::Matrix2cd RealConjugation::operator()(cplx z) const {
  const Eigen::Matrix2cd m = w1(z);
  // Branch of the square root continued from z = 0, where det W1 > 0.
  const cplx root = std::sqrt(std::abs(det0_)) * std::sqrt(m.determinant() / std::abs(det0_));
  return m / root;
}

Realification realify(const AnalyticTorusFunction& u1, const AnalyticTorusFunction& u2, long twist, double r) {
  Realification out{RealConjugation(u1, u2, twist)};
  out.det_floor = std::numeric_limits<double>::infinity();
  for_strip(r, 512, [&](cplx z) {
    out.det_floor = std::min(out.det_floor, std::abs(out.w.w1(z).determinant()));
    out.det_drift = std::max(out.det_drift, std::abs(out.w(z).determinant() - 1.0));
  });
  if (out.det_floor < 1e-12) {
    throw NumericError("DeterminantVanishes", "min |det W1| on the strip is " + std::to_string(out.det_floor));
  }
  for (int k = 0; k < 512; ++k) out.imag_part = std::max(out.imag_part, out.w(cplx(k / 512.0, 0.0)).imag().cwiseAbs().maxCoeff());
  return out;
}

long conjugation_degree(const std::function<Eigen::Matrix2cd(cplx)>& w, int grid) {
  double total = 0.0;
  const auto angle = [&](int k) {
    const Eigen::Matrix2cd m = w(cplx(static_cast<double>(k) / grid, 0.0));
    return std::atan2(m(1, 0).real(), m(0, 0).real());
  };
  double prev = angle(0);
  for (int k = 1; k <= grid; ++k) {
    const double cur = angle(k);
    double step = cur - prev;
    step -= kTwoPi * std::round(step / kTwoPi);
    total += step;
    prev = cur;
  }
  return std::lround(total / std::numbers::pi);
}

// ---------------------------------------------------------------- dual phase

namespace {

double hellmann_feynman(const Eigenpair& p, double alpha) {
  double num = 0.0, den = 0.0;
  for (long j = p.j_min; j <= p.j_max; ++j) {
    const double w = std::norm(p.u(j - p.j_min));
    num += -2.0 * kTwoPi * std::sin(kTwoPi * (p.theta + static_cast<double>(p.original_site(j)) * alpha)) * w;
    den += w;
  }
  return num / den;
}

Eigenpair delta_pair(double theta, double energy, int sites) {
  Eigenpair p;
  p.energy = energy;
  p.theta = theta;
  p.shifted_theta = theta;
  p.sites = sites;
  p.j_min = -sites;
  p.j_max = sites;
  p.u = Eigen::VectorXcd::Zero(2 * sites + 1);
  p.u(sites) = 1.0;
  for (long j = -sites; j <= sites; ++j) p.log_abs.push_back(j == 0 ? 0.0 : -std::numeric_limits<double>::infinity());
  return p;
}

std::optional<Eigenpair> try_pair(const TrigPolynomial& v, double alpha, double theta, double energy, int sites) {
  try {
    auto p = eigenpair_near(v, alpha, theta, energy, sites);
    if (std::labs(p.peak) > sites / 4) return std::nullopt;
    return p;
  } catch (const NumericError&) {
    return std::nullopt;
  }
}

}  // namespace

Eigenpair find_dual_phase(const TrigPolynomial& v, double alpha, double energy, int sites,
                          std::optional<double> hint) {
  if (v.degree() == 0) {
    const double c = (energy - v.coeff(0).real()) / 2.0;
    if (std::fabs(c) > 1.0) throw NumericError("PhaseNotFound", "energy outside [V0 − 2, V0 + 2]");
    return delta_pair(std::acos(c) / kTwoPi, energy, sites);
  }
  std::vector<double> starts;
  if (hint) {
    starts.push_back(*hint);
  } else {
    for (int i = 0; i < 128; ++i) starts.push_back((i + 0.5) / 128.0);
  }
  std::optional<Eigenpair> best;
  for (double th : starts) {
    auto p = try_pair(v, alpha, th, energy, sites);
    if (p && (!best || std::abs(p->energy - energy) < std::abs(best->energy - energy))) best = std::move(p);
  }
  if (!best) throw NumericError("PhaseNotFound", "no centred eigenvalue near the energy");

  double theta = best->shifted_theta;
  for (int it = 0; it < 40; ++it) {
    auto p = try_pair(v, alpha, theta, energy, sites);
    if (!p) break;
    if (p->peak != 0) {
      theta = p->shifted_theta;
      continue;
    }
    const double miss = p->energy - energy;
    if (std::fabs(miss) <= 1e-13 * (1.0 + std::fabs(energy))) return *p;
    const double slope = hellmann_feynman(*p, alpha);
    if (slope == 0.0) break;
    theta = mod1(theta - miss / slope);
  }
  throw NumericError("PhaseNotFound", "Newton iteration on the dual phase did not converge");
}

// ---------------------------------------------------------------- pipeline

std::optional<long> gap_edge_label(double rho, double alpha, double tol, long range) {
  std::optional<long> best;
  double dist = tol;
  for (long k = -range; k <= range; ++k) {
    const double x = torus_dist(2.0 * rho - static_cast<double>(k) * alpha);
    if (x < dist) {
      dist = x;
      best = k;
    }
  }
  return best;
}

namespace {

struct Stages {
  BlochVector bloch;
  Completion completion;
  AnalyticTorusFunction b;  // (M(·+α)^{-1} A_E M)_{12}
};

Stages first_stages(const TrigPolynomial& v, double alpha, double energy, const Eigenpair& pair, long k,
                    double r_max) {
  // conj(u) solves the equation with V_k u_{j−k}, which is the form the Bloch identity uses.
  const Eigen::VectorXcd ubar = pair.u.conjugate();
  Stages s{build_bloch(v, alpha, energy, ubar, pair.j_min, -k, k, pair.shifted_theta), {}, {}};
  s.completion = complete_to_sl2(s.bloch.u1, s.bloch.u2, r_max);
  const auto& w1 = s.completion.m.a12;
  const auto& w2 = s.completion.m.a22;
  s.b = (w2.shifted(alpha) * (energy_minus_v(v, energy) * w1 - w2) - w1.shifted(alpha) * w1).trimmed(1e-300);
  return s;
}

Eigen::Matrix2cd conjugated(const TrigPolynomial& v, double alpha, double energy,
                            const std::function<Eigen::Matrix2cd(cplx)>& b, cplx z) {
  return b(z + alpha).inverse() * schrodinger_at(v, energy, z) * b(z);
}

Eigen::Matrix2cd rotation(double t) {
  Eigen::Matrix2cd r;
  r << std::cos(kTwoPi * t), -std::sin(kTwoPi * t), std::sin(kTwoPi * t), std::cos(kTwoPi * t);
  return r;
}

void fill_errors(ConjugationReport& rep, const TrigPolynomial& v, double alpha, double energy,
                 const std::function<Eigen::Matrix2cd(cplx)>& b, const Eigen::Matrix2cd& target,
                 const std::vector<double>& radii) {
  const auto err = [&](cplx z) -> Eigen::Matrix2cd { return conjugated(v, alpha, energy, b, z) - target; };
  for (double r : radii) rep.error_r.emplace_back(r, strip_sup(err, r));
  rep.error_real_grid = strip_sup(err, 0.0, 256);
}

}  // namespace

std::vector<ConjugationReport> almost_reduce(const TrigPolynomial& v, double alpha, double energy,
                                             const ReduceOptions& opts) {
  if (opts.radii.empty()) throw ConfigError("at least one radius is required");
  if (opts.scales.empty()) throw ConfigError("at least one scale is required");
  if (!(opts.c0 > 1.0)) throw ConfigError("C0 must exceed 1");
  const double r_max = *std::max_element(opts.radii.begin(), opts.radii.end());

  const auto rho = rotation_number(schrodinger_cocycle(v, alpha, energy), opts.rotation_iterations);
  const auto label = gap_edge_label(rho.rho, alpha, opts.gap_edge_tol, opts.gap_edge_range);

  Eigenpair pair;
  long resonance = 0;
  if (!label) {
    pair = find_dual_phase(v, alpha, energy, opts.sites, opts.theta_hint);
  } else {
    // Gap edge: the dual phase is resonant, 2θ − nα ∈ Z.
    std::optional<Eigenpair> best;
    for (long m = -opts.gap_edge_range; m <= opts.gap_edge_range; ++m) {
      for (int half = 0; half < 2; ++half) {
        auto p = try_pair(v, alpha, mod1(static_cast<double>(m) * alpha / 2.0 + 0.5 * half), energy, opts.sites);
        if (p && (!best || std::abs(p->energy - energy) < std::abs(best->energy - energy))) {
          best = std::move(p);
          resonance = m + 2 * best->peak;
        }
      }
    }
    if (!best) throw NumericError("PhaseNotFound", "no resonant dual phase carries the energy");
    pair = *best;
  }
  const double e_used = pair.energy;
  const double theta = pair.shifted_theta;

  std::vector<ConjugationReport> out;
  for (std::size_t l = 0; l < opts.scales.size(); ++l) {
    const long n = opts.scales[l];
    const long k = static_cast<long>(std::floor(static_cast<double>(n) / opts.c0)) - 1;
    if (k < 0) throw ConfigError("scale too small for C0");
    ConjugationReport rep;
    rep.scale = static_cast<int>(l);
    rep.n = n;
    rep.x1 = -k;
    rep.x2 = k;
    rep.energy = e_used;
    rep.theta = theta;
    rep.rho_energy = rho.rho;

    Stages st = first_stages(v, alpha, e_used, pair, k, r_max);
    rep.bloch_residual = st.bloch.residual;
    rep.g_norm = band_norm(st.bloch.g, r_max).grid;
    rep.sl2_det_error = st.completion.det_error;
    rep.u_floor = st.completion.floor;
    rep.u_floor_bound = std::exp(-2.0 * opts.eta * static_cast<double>(n));
    const TorusMatrix& m = st.completion.m;

    if (!label) {
      rep.branch = "reducible";
      long cutoff = n;
      OffdiagElimination elim;
      while (true) {
        try {
          elim = eliminate_offdiag(st.b, theta, alpha, cutoff);
          break;
        } catch (const ResonantDivisor& e) {
          long first = cutoff;
          for (long j : e.modes()) first = std::min(first, std::labs(j));
          cutoff = std::max(1L, first);
          rep.cutoff_moved = true;
          if (first == 0) throw;
        }
      }
      rep.offdiag_tail = band_norm(elim.tail, r_max).grid;
      const auto bc = [&](cplx z) -> Eigen::Matrix2cd {
        Eigen::Matrix2cd b = m(z);
        b.col(1) += elim.tau(z) * b.col(0);
        return b;
      };
      Eigen::Matrix2cd diag = Eigen::Matrix2cd::Zero();
      diag(0, 0) = expi(kTwoPi * theta);
      diag(1, 1) = expi(-kTwoPi * theta);
      for (double r : opts.radii) {
        rep.complex_error_r.emplace_back(
            r, strip_sup([&](cplx z) -> Eigen::Matrix2cd { return conjugated(v, alpha, e_used, bc, z) - diag; }, r));
      }

      const auto real = realify(st.bloch.u1, st.bloch.u2, 0, r_max);
      rep.det_floor = real.det_floor;
      rep.det_drift = real.det_drift;
      const double t = real.w.swapped() ? -theta : theta;
      rep.target = real.w.swapped() ? "R_-theta" : "R_theta";
      const std::function<Eigen::Matrix2cd(cplx)> w = [conj = real.w](cplx z) { return conj(z); };
      fill_errors(rep, v, alpha, e_used, w, rotation(t), opts.radii);
      rep.degree = conjugation_degree(w);
      rep.rho_predicted = fold_rotation(mod1(t + static_cast<double>(rep.degree) * alpha / 2.0));
      rep.rho_mismatch = torus_dist(rep.rho_energy - rep.rho_predicted);
      rep.conjugation = w;
    } else {
      rep.branch = "parabolic";
      rep.target = "parabolic";
      rep.resonance = resonance;
      const cplx sign = expi(std::numbers::pi * (2.0 * theta - static_cast<double>(resonance) * alpha));
      const double s = sign.real() >= 0.0 ? 1.0 : -1.0;
      const auto bt = st.b.mode_shifted(-resonance) * expi(-std::numbers::pi * static_cast<double>(resonance) * alpha);
      const auto coh = cohomological_solve(bt * s, alpha);
      rep.parabolic_c = coh.mean;
      const auto bc = [m, phi = coh.phi, resonance](cplx z) -> Eigen::Matrix2cd {
        const cplx tw = std::exp(cplx(0.0, std::numbers::pi * static_cast<double>(resonance)) * z);
        Eigen::Matrix2cd b = m(z);
        b.col(0) *= tw;
        b.col(1) /= tw;
        b.col(1) += phi(z) * b.col(0);
        return b;
      };
      Eigen::Matrix2cd target;
      target << s, s * coh.mean, 0.0, s;
      fill_errors(rep, v, alpha, e_used, bc, target, opts.radii);
      rep.det_drift = 0.0;
      for_strip(r_max, 512, [&](cplx z) { rep.det_drift = std::max(rep.det_drift, std::abs(bc(z).determinant() - 1.0)); });
      rep.rho_predicted = fold_rotation(mod1(static_cast<double>(*label) * alpha / 2.0));
      rep.rho_mismatch = torus_dist(rep.rho_energy - rep.rho_predicted);
      rep.conjugation = bc;
    }
    out.push_back(std::move(rep));
  }
  return out;
}

NormGrowth norm_growth(const TrigPolynomial& v, double alpha, double energy, double r, long n_min, long n_max,
                       int grid) {
  if (n_min < 1 || n_max <= n_min) throw ConfigError("need 1 <= n_min < n_max");
  std::vector<long> marks;
  for (double t = std::log(static_cast<double>(n_min)); t <= std::log(static_cast<double>(n_max)) + 1e-12; t += 0.25)
    marks.push_back(std::lround(std::exp(t)));
  std::vector<double> best(marks.size(), -std::numeric_limits<double>::infinity());
  for (int g = 0; g < grid; ++g) {
    const cplx z0((g + 0.5) / grid, r);
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
    double scale = 0.0, running = -std::numeric_limits<double>::infinity();
    std::size_t next = 0;
    for (long n = 1; n <= marks.back(); ++n) {
      m = schrodinger_at(v, energy, z0 + static_cast<double>(n - 1) * alpha) * m;
      const double nrm = m.norm();
      m /= nrm;
      scale += std::log(nrm);
      running = std::max(running, scale + std::log(op_norm(m)));
      while (next < marks.size() && marks[next] == n) {
        best[next] = std::max(best[next], running);
        ++next;
      }
    }
  }
  NormGrowth out;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < marks.size(); ++i) {
    out.samples.emplace_back(marks[i], best[i]);
    xs.push_back(std::log(static_cast<double>(marks[i])));
    ys.push_back(best[i]);
  }
  out.exponent = fit_line(xs, ys).slope;
  return out;
}

void dump_coefficients(const std::string& path, const std::function<Eigen::Matrix2cd(cplx)>& f, long keep,
                       int grid) {
  std::vector<std::vector<cplx>> s(4, std::vector<cplx>(static_cast<std::size_t>(grid)));
  for (int k = 0; k < grid; ++k) {
    const Eigen::Matrix2cd m = f(cplx(static_cast<double>(k) / grid, 0.0));
    for (int e = 0; e < 4; ++e) s[static_cast<std::size_t>(e)][static_cast<std::size_t>(k)] = m(e / 2, e % 2);
  }
  std::vector<AnalyticTorusFunction> c;
  for (const auto& x : s) c.push_back(AnalyticTorusFunction::from_samples(x, keep));
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open " + path);
  const std::int64_t header[4] = {-keep, keep, 2, 2};
  os.write(reinterpret_cast<const char*>(header), sizeof(header));
  for (long j = -keep; j <= keep; ++j)
    for (const auto& fn : c) {
      const double re_im[2] = {fn.coeff(j).real(), fn.coeff(j).imag()};
      os.write(reinterpret_cast<const char*>(re_im), sizeof(re_im));
    }
}

}  // namespace arclab
