#include "arclab/localization.hpp"

#include <algorithm>
#include <cmath>

namespace arclab {

namespace {

double log_abs_or_floor(cplx z) {
  const double a = std::abs(z);
  return a > 0.0 ? std::log(a) : -std::numeric_limits<double>::infinity();
}

// Walks sites 0..n−1 (n a multiple of d) towards a Dirichlet end just past n−1.
// band holds c_{−d..d} in walking orientation; anchor is u on sites 0..d−1.
std::vector<double> riccati_tail(const std::vector<cplx>& band, const std::vector<cplx>& shifted_diag,
                                 const Eigen::VectorXcd& anchor) {
  const int d = static_cast<int>(band.size() / 2);
  const int n = static_cast<int>(shifted_diag.size());
  const int blocks = n / d;
  const auto c = [&](int k) { return std::abs(k) <= d ? band[static_cast<std::size_t>(k + d)] : cplx(0.0); };

  Eigen::MatrixXcd up(d, d), down(d, d);
  for (int r = 0; r < d; ++r)
    for (int col = 0; col < d; ++col) {
      up(r, col) = c(d + col - r);
      down(r, col) = c(-d + col - r);
    }
  const auto diag_block = [&](int j) {
    Eigen::MatrixXcd b(d, d);
    for (int r = 0; r < d; ++r)
      for (int col = 0; col < d; ++col) b(r, col) = c(col - r);
    for (int r = 0; r < d; ++r) b(r, r) += shifted_diag[static_cast<std::size_t>(j * d + r)];
    return b;
  };

  // b_j = S_j b_{j−1}; b_blocks = 0.
  std::vector<Eigen::MatrixXcd> s(static_cast<std::size_t>(blocks));
  Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(d, d);
  for (int j = blocks - 1; j >= 1; --j) {
    const Eigen::MatrixXcd lhs = up * next + diag_block(j);
    next = -lhs.partialPivLu().solve(down);
    s[static_cast<std::size_t>(j)] = next;
  }

  std::vector<double> out(static_cast<std::size_t>(n));
  Eigen::VectorXcd w = anchor;
  double log_scale = 0.0;
  const auto emit = [&](int j) {
    for (int r = 0; r < d; ++r) out[static_cast<std::size_t>(j * d + r)] = log_scale + log_abs_or_floor(w(r));
  };
  emit(0);
  for (int j = 1; j < blocks; ++j) {
    w = s[static_cast<std::size_t>(j)] * w;
    const double nrm = w.norm();
    if (nrm == 0.0) {
      for (int t = j * d; t < n; ++t) out[static_cast<std::size_t>(t)] = -std::numeric_limits<double>::infinity();
      break;
    }
    w /= nrm;
    log_scale += std::log(nrm);
    emit(j);
  }
  return out;
}

Eigen::VectorXcd apply_shifted(const TruncatedOperator& op, double energy, const Eigen::VectorXcd& u) {
  const int n = op.size(), b = op.bandwidth();
  Eigen::VectorXcd out(n);
  for (int i = 0; i < n; ++i) {
    cplx acc = (op.diagonal()[static_cast<std::size_t>(i)] - energy) * u(i);
    for (int k = -b; k <= b; ++k) {
      if (k == 0 || i + k < 0 || i + k >= n) continue;
      acc += op.band()[static_cast<std::size_t>(k + b)] * u(i + k);
    }
    out(i) = acc;
  }
  return out;
}

long argmax_abs(const Eigen::VectorXcd& u) {
  Eigen::Index best = 0;
  u.cwiseAbs().maxCoeff(&best);
  return static_cast<long>(best);
}

}  // namespace

std::vector<double> log_profile(const TruncatedOperator& op, double energy, const Eigen::VectorXcd& u, long peak) {
  const int n = op.size(), d = op.bandwidth();
  const long x1 = op.x1(), x2 = op.x2();
  const double top = u.cwiseAbs().maxCoeff();
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = log_abs_or_floor(u(i));
  if (d == 0) return out;

  std::vector<cplx> shifted(op.diagonal());
  for (auto& x : shifted) x -= energy;

  // Right of the peak.
  const long right_blocks = (x2 - peak + 1) / d;
  if (right_blocks >= 2) {
    const long s0 = x2 - right_blocks * d + 1;
    std::vector<cplx> diag(shifted.begin() + (s0 - x1), shifted.end());
    const auto tail = riccati_tail(op.band(), diag, u.segment(s0 - x1, d));
    for (std::size_t t = 0; t < tail.size(); ++t) {
      const long i = s0 - x1 + static_cast<long>(t);
      if (std::abs(u(i)) < 1e-8 * top) out[static_cast<std::size_t>(i)] = tail[t];
    }
  }
  // Left of the peak, walked in reverse.
  const long left_blocks = (peak - x1 + 1) / d;
  if (left_blocks >= 2) {
    const long s0 = x1 + left_blocks * d - 1;
    std::vector<cplx> band(op.band().rbegin(), op.band().rend());
    std::vector<cplx> diag;
    Eigen::VectorXcd anchor(d);
    for (long i = s0; i >= x1; --i) diag.push_back(shifted[static_cast<std::size_t>(i - x1)]);
    for (int r = 0; r < d; ++r) anchor(r) = u(s0 - x1 - r);
    const auto tail = riccati_tail(band, diag, anchor);
    for (std::size_t t = 0; t < tail.size(); ++t) {
      const long i = s0 - x1 - static_cast<long>(t);
      if (std::abs(u(i)) < 1e-8 * top) out[static_cast<std::size_t>(i)] = tail[t];
    }
  }
  return out;
}

Eigenpair eigenpair_near(const TrigPolynomial& v, double alpha, double theta, double target, int sites) {
  if (sites < 1) throw ConfigError("sites must be positive");
  const auto op = truncate(v, alpha, cplx(theta), -sites, sites);
  const auto w = op.eigenvalues();
  const double window = 10.0 / sites;

  struct Candidate {
    double energy;
    Eigen::VectorXcd u;
    long peak;
  };
  std::optional<Candidate> best;
  for (double e : w) {
    if (std::abs(e - target) > window) continue;
    Eigen::VectorXcd u = op.eigenvector(e);
    const long peak = op.x1() + argmax_abs(u);
    const bool better = !best || std::labs(peak) < std::labs(best->peak) ||
                        (std::labs(peak) == std::labs(best->peak) &&
                         std::abs(e - target) < std::abs(best->energy - target));
    if (better) best = Candidate{e, std::move(u), peak};
  }
  if (!best) {
    double nearest = std::numeric_limits<double>::infinity();
    for (double e : w) nearest = std::min(nearest, std::abs(e - target));
    throw NumericError("NoEigenvalueWithin",
                       "nearest eigenvalue is " + std::to_string(nearest) + " away, above 10/sites");
  }

  Eigenpair out;
  out.energy = best->energy;
  out.theta = theta;
  out.sites = sites;
  out.peak = best->peak;
  out.shifted_theta = mod1(theta + static_cast<double>(best->peak) * alpha);
  out.j_min = -sites - best->peak;
  out.j_max = sites - best->peak;
  out.u = best->u / best->u(best->peak - op.x1());
  out.residual = apply_shifted(op, out.energy, out.u).norm() / out.u.norm();
  out.log_abs = log_profile(op, out.energy, out.u, out.peak);
  return out;
}

std::optional<ScaleChoice> scale_choice(long j, long n_l, std::optional<long> next, double c0,
                                        const std::vector<long>& q) {
  if (j <= 0 || q.empty()) return std::nullopt;
  const long nl = std::labs(n_l);
  const bool inner = j > 2 * nl && (!next || 2 * j < std::labs(*next));
  ScaleChoice sc;
  sc.zeta = inner ? 1.0 / 32.0 : (c0 - 1.0) / (16.0 * c0);
  const double zj = sc.zeta * static_cast<double>(j);
  // Largest ℓ with 2q_ℓ ≤ ζj; then s = ⌊ζj / 2q_ℓ⌋ also satisfies ζj < 2q_{ℓ+1}.
  int ell = -1;
  for (std::size_t t = 0; t < q.size(); ++t)
    if (2.0 * static_cast<double>(q[t]) <= zj) ell = static_cast<int>(t);
  if (ell < 0) return std::nullopt;
  if (static_cast<std::size_t>(ell) + 1 >= q.size()) return std::nullopt;
  sc.ell = ell;
  sc.q = q[static_cast<std::size_t>(ell)];
  sc.s = static_cast<long>(std::floor(zj / (2.0 * static_cast<double>(sc.q))));
  const long w = 2 * sc.s * sc.q;
  const double n_next = next ? static_cast<double>(std::labs(*next)) : std::numeric_limits<double>::infinity();
  if (3.0 * static_cast<double>(j) < n_next) {
    sc.i1 = n_l >= 0 ? std::pair<long, long>{-w + 1, 0} : std::pair<long, long>{1, w};
    sc.i2 = {j - w + 1, j + w};
  } else if (2.0 * static_cast<double>(j) < n_next) {
    sc.i1 = {-w + 1, w};
    sc.i2 = {j - w + 1, j};
  } else {
    sc.i1 = {-w + 1, w};
    sc.i2 = {j + 1, j + w};
  }
  return sc;
}

std::vector<MaskWindow> resonance_windows(const ResonanceSet& set, double c0, double eta) {
  if (!(c0 > 1.0)) throw ConfigError("C0 must exceed 1");
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("eta must lie in (0, 1)");
  // Distinct |n| in increasing order.
  std::vector<long> ns;
  for (long n : set.indices())
    if (ns.empty() || std::labs(n) > std::labs(ns.back())) ns.push_back(n);
  std::vector<MaskWindow> out;
  for (std::size_t l = 0; l < ns.size(); ++l) {
    MaskWindow w;
    w.n_l = ns[l];
    const double a = 2.0 * c0 * static_cast<double>(std::labs(ns[l]));
    if (l + 1 < ns.size()) {
      const double b = static_cast<double>(std::labs(ns[l + 1]));
      w.n_next = ns[l + 1];
      w.lo = a + eta * b;
      w.hi = b / (2.0 * c0);
      if (w.hi <= w.lo) continue;
    } else {
      w.lo = a;
    }
    out.push_back(w);
  }
  return out;
}

LocalizationReport decay_report(const Eigenpair& pair, const ResonanceSet& set, double c0, double eta,
                                const std::vector<long>& denominators, std::optional<double> gamma) {
  LocalizationReport rep;
  rep.theta = pair.shifted_theta;
  rep.energy = pair.energy;
  rep.sites = pair.sites;
  rep.peak = pair.peak;
  rep.resonance_set = set;
  rep.windows = resonance_windows(set, c0, eta);

  const double bulk = 0.8 * pair.sites;
  std::vector<double> xs, ys;
  std::vector<std::vector<double>> wx(rep.windows.size()), wy(rep.windows.size());
  for (long j = pair.j_min; j <= pair.j_max; ++j) {
    if (j == 0 || std::fabs(static_cast<double>(pair.original_site(j))) > bulk) continue;
    const double y = pair.log_at(j);
    if (!std::isfinite(y)) continue;
    for (std::size_t w = 0; w < rep.windows.size(); ++w) {
      const auto& win = rep.windows[w];
      if (!win.contains(static_cast<double>(std::labs(j)))) continue;
      if (!scale_choice(std::labs(j), win.n_l, win.n_next, c0, denominators)) continue;
      xs.push_back(static_cast<double>(std::labs(j)));
      ys.push_back(y);
      wx[w].push_back(xs.back());
      wy[w].push_back(y);
      rep.masked.push_back(j);
      break;
    }
  }
  if (xs.size() < 3) throw EmptyMask("no resonance window survives masking at " + std::to_string(pair.sites) + " sites");

  const auto fit = fit_line(xs, ys);
  rep.masked_decay_rate = -fit.slope;
  double mean = 0.0, sxx = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  for (double x : xs) sxx += (x - mean) * (x - mean);
  rep.rate_stderr = sxx > 0.0 ? fit.rms_residual / std::sqrt(sxx) : 0.0;
  if (gamma) rep.predicted_rate = *gamma - 2.0 * rep.rate_stderr;

  for (std::size_t w = 0; w < rep.windows.size(); ++w) {
    WindowRate wr{rep.windows[w], static_cast<int>(wx[w].size()), 0.0};
    if (wr.points >= 3) wr.rate = -fit_line(wx[w], wy[w]).slope;
    rep.window_rates.push_back(wr);
  }
  return rep;
}

RegularityWitness regularity_check(const TrigPolynomial& v, double alpha, double theta, double energy, long y,
                                   long m, double xi) {
  const int d = v.degree();
  if (m < 7L * d) throw ConfigError("m must be at least 7d");
  RegularityWitness best;
  best.worst = std::numeric_limits<double>::infinity();
  const double min_gap = static_cast<double>(m) / 7.0;
  for (long x1 = y - m + 1; x1 <= y; ++x1) {
    const long x2 = x1 + m - 1;
    if (static_cast<double>(y - x1) < min_gap || static_cast<double>(x2 - y) < min_gap) continue;
    const auto op = truncate(v, alpha, cplx(theta), x1, x2);
    Eigen::VectorXcd row;
    try {
      row = greens_row(op, energy, y);
    } catch (const NumericError&) {
      continue;
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < d; ++j) {
      worst = std::max(worst, std::log(std::abs(row(j))) + xi * static_cast<double>(y - x1));
      worst = std::max(worst, std::log(std::abs(row(m - 1 - j))) + xi * static_cast<double>(x2 - y));
    }
    if (worst < best.worst) {
      best.worst = worst;
      best.x1 = x1;
      best.x2 = x2;
    }
    if (worst < 0.0) {
      best.regular = true;
      return best;
    }
  }
  return best;
}

}  // namespace arclab
