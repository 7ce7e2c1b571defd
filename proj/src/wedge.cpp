#include "arclab/wedge.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "arclab/cocycle.hpp"

namespace arclab {

std::vector<std::vector<int>> combinations(int n, int m) {
  std::vector<std::vector<int>> out;
  if (m < 0 || m > n) return out;
  std::vector<int> c(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) c[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(c);
    int i = m - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - m + i) --i;
    if (i < 0) break;
    ++c[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < m; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

Eigen::MatrixXcd submatrix(const Eigen::MatrixXcd& a, const std::vector<int>& rows, const std::vector<int>& cols) {
  Eigen::MatrixXcd s(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      s(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = a(rows[r], cols[c]);
  return s;
}

Eigen::MatrixXcd exterior_power(const Eigen::MatrixXcd& a, int m) {
  const auto idx = combinations(static_cast<int>(a.rows()), m);
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXcd out(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      out(r, c) = submatrix(a, idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]).determinant();
  return out;
}

void WedgeMinorRequest::validate(int d) const {
  if (m < 1 || m > d) throw IndexOutOfRange("m must lie in 1.." + std::to_string(d));
  if (static_cast<int>(rows.size()) != m || static_cast<int>(cols.size()) != m) {
    throw IndexOutOfRange("need exactly m row and column indices");
  }
  for (const auto* list : {&rows, &cols}) {
    for (std::size_t t = 0; t < list->size(); ++t) {
      const int v = (*list)[t];
      if (v < -d || v > d - 1) throw IndexOutOfRange("index " + std::to_string(v) + " outside [-d, d-1]");
      if (t > 0 && (*list)[t - 1] >= v) throw IndexOutOfRange("indices must be strictly increasing");
    }
  }
  if (k < 0) throw IndexOutOfRange("k must be nonnegative");
}

namespace {

// Position of δ_ℓ in the state vector (u(d−1), ..., u(−d)).
std::vector<int> positions(int d, const std::vector<int>& idx) {
  std::vector<int> p;
  for (int l : idx) p.push_back(d - 1 - l);
  std::sort(p.begin(), p.end());
  return p;
}

}  // namespace

LogDet wedge_minor_Q(const TrigPolynomial& v, double alpha, cplx theta, double energy, const WedgeMinorRequest& req) {
  const int d = v.degree();
  req.validate(d);
  const auto c = dual_cocycle(v, alpha, energy);
  const auto prod = transfer_product(c, theta, req.k);
  // Sorting both index lists by position applies the same permutation to rows and columns.
  LogDet out = dense_log_det(submatrix(prod.matrix, positions(d, req.rows), positions(d, req.cols)));
  if (!out.is_zero()) out.log_abs += req.m * prod.log_scale;
  return out;
}

LogDet general_truncated_det(const TrigPolynomial& v, double alpha, cplx theta, double energy,
                             const std::vector<long>& row_set, const std::vector<long>& col_set) {
  if (row_set.size() != col_set.size()) throw IndexOutOfRange("row and column sets differ in size");
  const int d = v.degree();
  const auto n = static_cast<Eigen::Index>(row_set.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const long row = row_set[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < n; ++c) {
      const long k = col_set[static_cast<std::size_t>(c)] - row;
      if (k < -d || k > d) continue;
      cplx e = v.coeff(static_cast<int>(k));
      if (k == 0) e += 2.0 * std::cos(kTwoPi * (theta + static_cast<double>(row) * alpha)) - energy;
      m(r, c) = e;
    }
  }
  return dense_log_det(m);
}

std::vector<long> th1_columns(int d, long k, const WedgeMinorRequest& req) {
  req.validate(d);
  if (k < 2L * d) throw IndexOutOfRange("k must be at least 2d");
  std::set<long> cols;
  for (long c = d; c <= k - d - 1; ++c) cols.insert(c);
  for (int j : req.cols) cols.insert(j);
  for (long c = k - d; c <= k + d - 1; ++c) cols.insert(c);
  for (int i : req.rows) cols.erase(k + i);
  std::vector<long> out(cols.begin(), cols.end());
  if (static_cast<long>(out.size()) != k) throw IndexOutOfRange("column set does not have k elements");
  for (long c : out)
    if (c < -d || c > k + d - 1) throw IndexOutOfRange("column " + std::to_string(c) + " outside [-d, k+d-1]");
  return out;
}

LogDet th1_determinant(const TrigPolynomial& v, double alpha, cplx theta, double energy,
                       const WedgeMinorRequest& req) {
  std::vector<long> rows;
  for (long r = 0; r < req.k; ++r) rows.push_back(r);
  return general_truncated_det(v, alpha, theta, energy, rows, th1_columns(v.degree(), req.k, req));
}

Th1Report th1_ratio_check(const TrigPolynomial& v, double alpha, const std::vector<double>& energies,
                          const std::vector<double>& thetas, const std::vector<long>& ks, WedgeMinorRequest req) {
  Th1Report rep;
  const int d = v.degree();
  const LogDet vd{std::log(std::abs(v.leading())), std::arg(v.leading())};
  for (long k : ks) {
    req.k = k;
    for (double e : energies) {
      for (double th : thetas) {
        const LogDet det = th1_determinant(v, alpha, cplx(th), e, req);
        if (det.is_zero() || det.log_abs < -700.0) {
          ++rep.skipped;
          continue;
        }
        const LogDet q = wedge_minor_Q(v, alpha, cplx(th), e, req);
        // V_d^{-k}·det in log form.
        const LogDet denom{det.log_abs - static_cast<double>(k) * vd.log_abs,
                           det.phase - static_cast<double>(k) * vd.phase};
        rep.samples.push_back({k, e, th, (q / denom).value()});
      }
    }
  }
  if (rep.samples.empty()) return rep;
  cplx mean = 0.0, pmean = 0.0;
  for (const auto& s : rep.samples) {
    mean += s.ratio;
    pmean += ((req.m * s.k) % 2 == 0 ? 1.0 : -1.0) * s.ratio;
  }
  mean /= static_cast<double>(rep.samples.size());
  pmean /= static_cast<double>(rep.samples.size());
  rep.constant = mean;
  rep.parity_constant = pmean;
  for (const auto& s : rep.samples) {
    rep.spread = std::max(rep.spread, std::abs(s.ratio - mean) / std::abs(mean));
    const cplx p = ((req.m * s.k) % 2 == 0 ? 1.0 : -1.0) * s.ratio;
    rep.parity_spread = std::max(rep.parity_spread, std::abs(p - pmean) / std::abs(pmean));
  }
  (void)d;
  return rep;
}

std::vector<cplx> polynomial_roots(const std::function<cplx(double)>& f, int max_degree, double radius) {
  const int n = 2 * (max_degree + 1);
  Eigen::MatrixXcd vand(n, max_degree + 1);
  Eigen::VectorXcd vals(n);
  for (int j = 0; j < n; ++j) {
    const double t = std::cos(std::numbers::pi * (j + 0.5) / n);
    vals(j) = f(radius * t);
    double p = 1.0;
    for (int c = 0; c <= max_degree; ++c) {
      vand(j, c) = p;
      p *= t;
    }
  }
  const Eigen::VectorXcd coef = vand.colPivHouseholderQr().solve(vals);
  const double scale = coef.cwiseAbs().maxCoeff();
  int deg = max_degree;
  while (deg > 0 && std::abs(coef(deg)) <= 1e-9 * scale) --deg;
  std::vector<cplx> roots;
  if (deg == 0) return roots;
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
  for (int c = 0; c < deg; ++c) comp(0, c) = -coef(deg - 1 - c) / coef(deg);
  for (int r = 1; r < deg; ++r) comp(r, r - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp);
  for (Eigen::Index r = 0; r < deg; ++r) roots.push_back(radius * es.eigenvalues()(r));
  return roots;
}

double hausdorff_complex(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  const auto one_way = [](const std::vector<cplx>& x, const std::vector<cplx>& y) {
    double h = 0.0;
    for (const auto& p : x) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : y) best = std::min(best, std::abs(p - q));
      h = std::max(h, best);
    }
    return h;
  };
  return std::max(one_way(a, b), one_way(b, a));
}

ZeroSetReport zero_set_correspondence(const TrigPolynomial& v, double alpha, double theta,
                                      const WedgeMinorRequest& req) {
  double radius = 2.0;
  for (const auto& c : v.coefficients()) radius += std::abs(c);
  const int deg = static_cast<int>(req.k);
  ZeroSetReport rep;
  rep.q_roots = polynomial_roots(
      [&](double e) { return wedge_minor_Q(v, alpha, cplx(theta), e, req).value(); }, deg, radius);
  rep.det_roots = polynomial_roots(
      [&](double e) { return th1_determinant(v, alpha, cplx(theta), e, req).value(); }, deg, radius);
  rep.distance = hausdorff_complex(rep.q_roots, rep.det_roots);
  return rep;
}

Eigen::MatrixXcd block_tridiagonal(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, int k) {
  const auto d = a.rows();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(k * d, k * d);
  for (int blk = 0; blk < k; ++blk) {
    m.block(blk * d, blk * d, d, d) = b;
    if (blk + 1 < k) {
      m.block(blk * d, (blk + 1) * d, d, d) = a;
      m.block((blk + 1) * d, blk * d, d, d) = a.adjoint();
    }
  }
  return m;
}

namespace {

// 1-based inclusive range.
std::vector<int> range1(int lo, int hi) {
  std::vector<int> r;
  for (int x = lo; x <= hi; ++x) r.push_back(x);
  return r;
}

std::vector<int> minus(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  for (int x : a)
    if (std::find(b.begin(), b.end(), x) == b.end()) out.push_back(x);
  return out;
}

// Minor of M on 1-based rows/cols.
Eigen::MatrixXcd sub1(const Eigen::MatrixXcd& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  std::vector<int> r, c;
  for (int x : rows) r.push_back(x - 1);
  for (int x : cols) c.push_back(x - 1);
  return submatrix(m, r, c);
}

double log_abs_det(const Eigen::MatrixXcd& m) { return dense_log_det(m).log_abs; }

double log_sum_exp(const std::vector<double>& v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

void check_minor_hypotheses(int d, int k, int i, int j, int k0, const Eigen::MatrixXcd& m) {
  if (m.rows() != static_cast<Eigen::Index>(k) * d || m.cols() != m.rows()) throw ConfigError("M must be kd x kd");
  if (k0 < 2 || k < k0 + 10 || k < 20) throw ConfigError("need k0 >= 2, k >= k0 + 10 and k >= 20");
  if (i < k0 * d + 1 || i > (k0 + 1) * d) throw ConfigError("i outside [k0 d + 1, (k0+1) d]");
  if (j < (k - 1) * d + 1 || j > k * d) throw ConfigError("j outside the last block");
}

}  // namespace

BlockMinorExpansion block_minor_expansion(const Eigen::MatrixXcd& m, int d, int k, int i, int j, int k0) {
  check_minor_hypotheses(d, k, i, j, k0, m);
  BlockMinorExpansion out;
  const auto all = range1(1, k * d);
  const auto reduced_rows = minus(all, {i});
  const auto reduced_cols = minus(all, {j});
  const Eigen::MatrixXcd reduced = sub1(m, reduced_rows, reduced_cols);
  const LogDet full = dense_log_det(reduced);
  out.lhs = std::exp(full.log_abs);

  const auto mid_rows = minus(range1((k0 - 1) * d + 1, (k0 + 1) * d), {i});
  const auto top_rows = range1(1, (k0 - 1) * d);
  const auto bottom_rows = range1((k0 + 1) * d + 1, k * d);
  const auto sigma_pool = range1((k0 - 2) * d + 1, k0 * d);
  const auto tau_pool = range1(k0 * d + 1, (k0 + 2) * d);

  // Laplace sign for the reduced matrix: rows and columns renumbered after deleting i and j.
  int row_sign_sum = 0;
  for (int r : mid_rows) row_sign_sum += r > i ? r - 1 : r;

  std::vector<double> logs;
  cplx signed_sum = 0.0;
  double max_term = 0.0;
  for (const auto& sc : combinations(static_cast<int>(sigma_pool.size()), d)) {
    std::vector<int> sigma;
    for (int t : sc) sigma.push_back(sigma_pool[static_cast<std::size_t>(t)]);
    const LogDet mu_sigma = dense_log_det(sub1(m, top_rows, minus(range1(1, k0 * d), sigma)));
    for (const auto& tc : combinations(static_cast<int>(tau_pool.size()), d - 1)) {
      std::vector<int> tau;
      for (int t : tc) tau.push_back(tau_pool[static_cast<std::size_t>(t)]);
      auto cols = sigma;
      cols.insert(cols.end(), tau.begin(), tau.end());
      std::sort(cols.begin(), cols.end());
      auto rest = minus(range1(k0 * d + 1, k * d), tau);
      rest = minus(rest, {j});
      const LogDet mu_tau = dense_log_det(sub1(m, bottom_rows, rest));
      const LogDet head = dense_log_det(sub1(m, mid_rows, cols));
      const LogDet term = head * mu_sigma * mu_tau;
      ++out.terms;
      if (term.is_zero()) continue;
      logs.push_back(term.log_abs);
      int col_sign_sum = 0;
      for (int c : cols) col_sign_sum += c > j ? c - 1 : c;
      const double sign = (row_sign_sum + col_sign_sum) % 2 == 0 ? 1.0 : -1.0;
      const cplx value = sign * term.value();
      signed_sum += value;
      max_term = std::max(max_term, std::abs(value));
    }
  }
  out.rhs = std::exp(log_sum_exp(logs));
  const double scale = std::max({out.lhs, max_term, 1e-300});
  out.signed_error = std::abs(signed_sum - full.value()) / scale;
  return out;
}

StructuralZeros structural_zero_check(const Eigen::MatrixXcd& m, int d, int k, int i, int j, int k0, int samples,
                                      std::uint64_t seed) {
  check_minor_hypotheses(d, k, i, j, k0, m);
  std::mt19937_64 rng(seed);
  StructuralZeros out;
  const auto mid_rows = minus(range1((k0 - 1) * d + 1, (k0 + 1) * d), {i});
  const auto outer_rows = minus(minus(range1(1, k * d), range1((k0 - 1) * d + 1, (k0 + 1) * d)), {});
  const auto columns = minus(range1(1, k * d), {j});
  const int lo = (k0 - 2) * d + 1, hi = (k0 + 2) * d;

  const auto ratio = [](const Eigen::MatrixXcd& s) {
    double hadamard = 0.0;  // log of the product of column norms
    for (Eigen::Index c = 0; c < s.cols(); ++c) {
      const double n = s.col(c).norm();
      if (n == 0.0) return 0.0;
      hadamard += std::log(n);
    }
    const double l = log_abs_det(s);
    return std::isfinite(l) ? std::exp(l - hadamard) : 0.0;
  };
  const auto draw = [&](const std::vector<int>& pool, int size) {
    auto p = pool;
    std::shuffle(p.begin(), p.end(), rng);
    p.resize(static_cast<std::size_t>(size));
    std::sort(p.begin(), p.end());
    return p;
  };

  // γ reaching outside [lo, hi]: the middle rows have a zero column.
  std::vector<int> outside;
  for (int c : columns)
    if (c < lo || c > hi) outside.push_back(c);
  for (int s = 0; s < samples; ++s) {
    auto gamma = draw(minus(columns, {}), 2 * d - 2);
    int extra = outside[std::uniform_int_distribution<std::size_t>(0, outside.size() - 1)(rng)];
    while (std::find(gamma.begin(), gamma.end(), extra) != gamma.end()) {
      extra = outside[std::uniform_int_distribution<std::size_t>(0, outside.size() - 1)(rng)];
    }
    gamma.push_back(extra);
    std::sort(gamma.begin(), gamma.end());
    out.worst = std::max(out.worst, ratio(sub1(m, mid_rows, gamma)));
    ++out.checked;
  }

  // γ inside [lo, hi] with more than d columns on the σ side or more than d − 1 on the τ side.
  const auto left = range1(lo, k0 * d), right = range1(k0 * d + 1, hi);
  for (int s = 0; s < samples; ++s) {
    const bool left_heavy = s % 2 == 0;
    const int nl = left_heavy ? d + 1 : d - 1;
    const int nr = 2 * d - 1 - nl;
    if (nl > static_cast<int>(left.size()) || nr > static_cast<int>(right.size()) || nl < 0 || nr < 0) continue;
    auto gamma = draw(left, nl);
    const auto g2 = draw(right, nr);
    gamma.insert(gamma.end(), g2.begin(), g2.end());
    const auto rest = minus(columns, gamma);
    out.worst = std::max(out.worst, ratio(sub1(m, outer_rows, rest)));
    ++out.checked;
  }
  return out;
}

NumeratorBound numerator_bound_check(const TrigPolynomial& v, double alpha, double theta, double energy, long x1,
                                     long x2, long x, double eps, const std::vector<double>& gammas) {
  const int d = v.degree();
  if (static_cast<int>(gammas.size()) != d) throw ConfigError("need d Lyapunov exponents");
  const long len = x2 - x1 + 1;
  if (len < 30L * d || len % d != 0) throw ConfigError("interval length must be a multiple of d and at least 30d");
  if (x < x1 || x > x1 + d - 1) throw ConfigError("x must lie in the first block");
  const long k = len / d;
  const auto op = truncate(v, alpha, cplx(theta), x1, x2);
  const LogDet p = op.det(energy);
  const Eigen::VectorXcd row = greens_row(op, energy, x);

  double g_lower = 0.0, g_all = 0.0;
  for (int t = 0; t < d; ++t) {
    g_all += gammas[static_cast<std::size_t>(t)];
    if (t < d - 1) g_lower += gammas[static_cast<std::size_t>(t)];
  }
  const double lvd = std::log(std::abs(v.leading()));

  NumeratorBound out;
  out.x = x;
  out.worst_margin = std::numeric_limits<double>::infinity();
  std::vector<double> dist, lg;
  for (long k0 = 1; k0 <= k - 10; ++k0) {
    for (long y = x1 + k0 * d; y <= x1 + (k0 + 1) * d - 1; ++y) {
      const double log_g = std::log(std::abs(row(y - x1)));
      const double log_mu = log_g + p.log_abs;
      const double bound = (g_lower + lvd + eps) * static_cast<double>(y - x1) +
                           (g_all + lvd + eps) * static_cast<double>(x2 - y) + eps * static_cast<double>(k);
      out.ys.push_back(y);
      out.log_green.push_back(log_g);
      out.log_mu.push_back(log_mu);
      out.log_bound.push_back(bound);
      out.worst_margin = std::min(out.worst_margin, bound - log_mu);
      dist.push_back(static_cast<double>(y - x));
      lg.push_back(log_g);
    }
  }
  out.decay_rate = -fit_line(dist, lg).slope;
  return out;
}

}  // namespace arclab
