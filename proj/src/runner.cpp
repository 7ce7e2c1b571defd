#include "arclab/runner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>

#include "arclab/arithmetic.hpp"
#include "arclab/cocycle.hpp"
#include "arclab/localization.hpp"
#include "arclab/operators.hpp"
#include "arclab/reducibility.hpp"
#include "arclab/wedge.hpp"

namespace arclab {

using nlohmann::json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void CsvTable::add(const std::vector<double>& values) {
  std::vector<std::string> row;
  for (double v : values) row.push_back(format_number(v));
  rows.push_back(std::move(row));
}

std::string CsvTable::render() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
  return os.str();
}

namespace {

// Infinite or NaN doubles are not valid JSON numbers.
json num(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

json complex_json(cplx c) { return json::array({num(c.real()), num(c.imag())}); }

struct Context {
  const RunConfig& cfg;
  const json& p;
  TrigPolynomial v;
  double alpha;

  explicit Context(const RunConfig& c)
      : cfg(c), p(c.params), v(c.trig_polynomial()), alpha(static_cast<double>(c.alpha.value())) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  }

  template <class T>
  T get(const std::string& key) const {
    try {
      return p.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError("params." + key + ": " + e.what());
    }
  }

  const std::vector<double>& energies() const {
    if (cfg.energies.empty()) throw ConfigError(cfg.command + " needs --energy or --energy-grid");
    return cfg.energies;
  }

  LyapunovOptions lyapunov_options() const {
    LyapunovOptions o;
    o.iterations = get<long>("iters");
    o.samples = get<int>("samples");
    o.seed = cfg.seed;
    o.threads = cfg.threads;
    return o;
  }

  QuasiperiodicCocycle cocycle(double e, bool dual) const {
    return dual ? dual_cocycle(v, alpha, e) : schrodinger_cocycle(v, alpha, e);
  }
};

// Denominators q_k up to the first one beyond `limit`, or as far as precision allows.
std::vector<long> denominators_beyond(const ExtReal& alpha, long limit) {
  std::vector<long> q;
  for (int depth = 10; depth <= 120; depth += 10) {
    try {
      const auto cf = continued_fraction(alpha, depth);
      q.clear();
      for (auto x : cf.denominators()) q.push_back(static_cast<long>(x));
    } catch (const PrecisionExhausted&) {
      break;
    }
    if (q.back() > limit) break;
  }
  return q;
}

json resonance_json(const ResonanceSet& set) {
  json r = json::array();
  for (const auto& x : set.resonances) r.push_back({{"n", x.n}, {"distance", num(x.distance)}});
  return {{"theta", set.theta}, {"eps0", set.eps0}, {"horizon", set.horizon}, {"resonances", r}};
}

json run_arith(const Context& c, RunResult&) {
  const auto cf = continued_fraction(c.cfg.alpha.value(), c.get<int>("depth"));
  json conv = json::array();
  for (const auto& x : cf.convergents) conv.push_back({x.p, x.q});
  const auto set = resonances(c.get<double>("theta"), cf, c.get<double>("eps0"), c.get<long>("horizon"));
  return {{"partial_quotients", cf.partial_quotients},
          {"convergents", conv},
          {"beta_proxy", num(beta_estimate(cf))},
          {"resonances", resonance_json(set)}};
}

json run_lyapunov(const Context& c, RunResult& rr) {
  const auto opts = c.lyapunov_options();
  const bool dual = c.get<bool>("dual");
  CsvTable t{"lyapunov", {"E", "eps", "k", "Lk", "stderr"}, {}};
  json out = json::array();
  for (double e : c.energies()) {
    const auto coc = c.cocycle(e, dual);
    for (double eps : c.get<std::vector<double>>("eps_grid")) {
      const auto s = lyapunov_spectrum(coc, eps, opts);
      for (std::size_t k = 0; k < s.partial_sums.size(); ++k)
        t.add({e, eps, static_cast<double>(k + 1), s.partial_sums[k], s.partial_stderr[k]});
      out.push_back({{"E", e}, {"eps", eps}, {"exponents", s.raw_exponents}, {"partial_sums", s.partial_sums},
                     {"stderr", num(s.stderr)}});
    }
  }
  rr.tables.push_back(std::move(t));
  return {{"cocycle", dual ? "dual" : "schrodinger"}, {"spectra", out}};
}

json run_accel(const Context& c, RunResult& rr) {
  const auto opts = c.lyapunov_options();
  const int k = c.get<int>("k");
  const auto grid = c.get<std::vector<double>>("eps_grid");
  CsvTable t{"accel", {"E", "eps", "k", "Lk"}, {}};
  json out = json::array();
  for (double e : c.energies()) {
    const auto a = acceleration(c.cocycle(e, c.get<bool>("dual")), k, grid, opts);
    for (std::size_t i = 0; i < a.eps.size(); ++i) t.add({e, a.eps[i], static_cast<double>(k), a.values[i]});
    out.push_back({{"E", e},
                   {"omega", a.omega},
                   {"omega_raw", num(a.omega_raw)},
                   {"slope", num(a.slope)},
                   {"residual", num(a.residual)},
                   {"non_affine", a.non_affine}});
  }
  rr.tables.push_back(std::move(t));
  return {{"accelerations", out}};
}

json run_rho(const Context& c, RunResult& rr) {
  CsvTable t{"rho", {"E", "rho", "error_bound"}, {}};
  json out = json::array();
  for (double e : c.energies()) {
    const auto r = rotation_number(schrodinger_cocycle(c.v, c.alpha, e), c.get<long>("iters"));
    t.add({e, r.rho, r.error_bound});
    out.push_back({{"E", e}, {"rho", r.rho}, {"raw", r.raw}, {"error_bound", num(r.error_bound)},
                   {"iterations", r.iterations}});
  }
  rr.tables.push_back(std::move(t));
  return {{"rotation_numbers", out}};
}

json run_regime(const Context& c, RunResult& rr) {
  const auto opts = c.lyapunov_options();
  const int sites = c.get<int>("sites");
  const auto sample = spectrum_sample_schrodinger(c.v, c.alpha, sites, c.get<int>("phases"));
  CsvTable t{"regime", {"E", "eps", "k", "Lk", "stderr"}, {}};
  json out = json::array();
  for (double e : c.energies()) {
    const auto coc = schrodinger_cocycle(c.v, c.alpha, e);
    const auto l = lyapunov_spectrum(coc, 0.0, opts);
    t.add({e, 0.0, 1.0, l.partial_sums[0], l.partial_stderr[0]});
    const auto a = acceleration(coc, 1, c.get<std::vector<double>>("eps_grid"), opts);
    for (std::size_t i = 0; i < a.eps.size(); ++i) t.add({e, a.eps[i], 1.0, a.values[i], std::nan("")});
    const bool inside = in_spectrum(e, sample, sites);
    const Regime r = classify_regime(l.top(), a.omega, inside);
    json h = nullptr;
    bool capped = false;
    if (r == Regime::kSubcritical) {
      const auto rad = subcritical_radius(coc, c.get<std::vector<double>>("h_grid"), opts);
      h = num(rad.h);
      capped = rad.capped;
    }
    out.push_back({{"E", e},
                   {"L0", num(l.top())},
                   {"omega", a.omega},
                   {"in_spectrum", inside},
                   {"regime", to_string(r)},
                   {"h", h},
                   {"h_capped", capped}});
  }
  rr.tables.push_back(std::move(t));
  return {{"regimes", out}};
}

json run_det(const Context& c, RunResult& rr) {
  const double theta = c.get<double>("theta"), eps = c.get<double>("eps");
  const bool schr = c.get<bool>("schrodinger");
  CsvTable t{"det", {"E", "theta", "eps", "n", "log_abs_P", "phase"}, {}};
  for (double e : c.energies())
    for (long n : c.get<std::vector<long>>("n")) {
      const cplx z(theta, eps);
      const auto d = schr ? det_P_schrodinger(c.v, c.alpha, z, e, n) : det_P(c.v, c.alpha, z, e, n);
      t.add({e, theta, eps, static_cast<double>(n), d.log_abs, d.phase});
    }
  rr.tables.push_back(std::move(t));
  return {{"operator", schr ? "schrodinger" : "dual"}, {"rows", rr.tables.back().rows.size()}};
}

std::pair<long, long> parse_interval(const std::string& text) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument(text);
    std::size_t u1 = 0, u2 = 0;
    const std::string a = text.substr(0, colon), b = text.substr(colon + 1);
    const long x1 = std::stol(a, &u1), x2 = std::stol(b, &u2);
    if (u1 != a.size() || u2 != b.size() || x2 < x1) throw std::invalid_argument(text);
    return {x1, x2};
  } catch (const std::logic_error&) {
    throw ConfigError("interval must be a:b with a <= b, got '" + text + "'");
  }
}

json run_green(const Context& c, RunResult& rr) {
  const auto [x1, x2] = parse_interval(c.get<std::string>("interval"));
  const double theta = c.get<double>("theta");
  const bool schr = c.get<bool>("schrodinger");
  const auto op = schr ? truncate_schrodinger(c.v, c.alpha, cplx(theta), x1, x2) : truncate(c.v, c.alpha, cplx(theta), x1, x2);
  CsvTable t{"green", {"E", "x", "y", "re_G", "im_G"}, {}};
  json out = json::array();
  for (double e : c.energies()) {
    const auto tab = greens(op, e, {{x1, x2}}, false);
    for (long y = x1; y <= x2; ++y) {
      const auto col = greens_column(op, e, y);
      for (long x = x1; x <= x2; ++x) {
        const cplx g = col(x - x1);
        t.add({e, static_cast<double>(x), static_cast<double>(y), g.real(), g.imag()});
      }
    }
    out.push_back({{"E", e}, {"log_abs_P", num(tab.p.log_abs)}, {"rcond", num(tab.rcond)}});
  }
  rr.tables.push_back(std::move(t));
  return {{"operator", schr ? "schrodinger" : "dual"}, {"x1", x1}, {"x2", x2}, {"sections", out}};
}

json run_spectrum(const Context& c, RunResult& rr) {
  SampleOptions so;
  so.bulk_only = c.get<bool>("bulk_only");
  const int sites = c.get<int>("sites"), phases = c.get<int>("phases");
  const auto s = spectrum_sample_schrodinger(c.v, c.alpha, sites, phases, so);
  const auto d = spectrum_sample(c.v, c.alpha, sites, phases, so);
  CsvTable t{"spectrum", {"family", "E"}, {}};
  for (double e : s) t.rows.push_back({"schrodinger", format_number(e)});
  for (double e : d) t.rows.push_back({"dual", format_number(e)});
  rr.tables.push_back(std::move(t));
  return {{"schrodinger_count", s.size()}, {"dual_count", d.size()}, {"hausdorff", num(hausdorff(s, d))}};
}

json run_avgdet(const Context& c, RunResult& rr) {
  const long n = c.get<long>("n");
  const int grid = c.get<int>("grid");
  CsvTable t{"avgdet", {"E", "eps", "n", "mean_log_abs_P_over_n", "stderr"}, {}};
  json out = json::array();
  for (double e : c.energies())
    for (double eps : c.get<std::vector<double>>("eps_grid")) {
      const auto a = avg_log_det(c.v, c.alpha, e, n, eps, grid, c.cfg.seed, c.cfg.threads);
      t.add({e, eps, static_cast<double>(n), a.value, a.stderr});
      out.push_back({{"E", e}, {"eps", eps}, {"value", num(a.value)}, {"stderr", num(a.stderr)}, {"retries", a.retries}});
    }
  rr.tables.push_back(std::move(t));
  return {{"averages", out}};
}

TrigPolynomial random_potential(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<cplx> v{cplx(g(rng), 0.0)};
  for (int k = 1; k <= d; ++k) v.emplace_back(g(rng), g(rng));
  v.back() += cplx(1.0, 0.0);
  return TrigPolynomial::from_nonnegative(v);
}

Eigen::MatrixXcd random_block(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(d, d);
  for (int r = 0; r < d; ++r)
    for (int col = 0; col < d; ++col) m(r, col) = cplx(g(rng), g(rng));
  return m;
}

json run_wedge(const Context& c, RunResult& rr) {
  const std::string check = c.get<std::string>("check");
  const int draws = c.get<int>("draws");
  if (draws < 1) throw ConfigError("draws must be positive");
  std::mt19937_64 rng(c.cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int passes = 0, failures = 0;
  double worst = std::numeric_limits<double>::infinity();
  json constants = json::array();

  if (check == "th1") {
    const int d = c.get<int>("d");
    CsvTable t{"wedge_th1", {"draw", "k", "E", "theta", "re_ratio", "im_ratio"}, {}};
    for (int draw = 0; draw < draws; ++draw) {
      const auto v = random_potential(d, rng);
      std::vector<double> es, ths;
      for (int i = 0; i < 5; ++i) es.push_back(-2.0 + 4.0 * unit(rng));
      for (int i = 0; i < 3; ++i) ths.push_back(unit(rng));
      const auto r = th1_ratio_check(v, c.alpha, es, ths, {4, 6, 8}, {1, {0}, {-1}, 0});
      for (const auto& s : r.samples)
        t.add({static_cast<double>(draw), static_cast<double>(s.k), s.energy, s.theta, s.ratio.real(), s.ratio.imag()});
      (r.parity_spread <= 1e-6 ? passes : failures) += 1;
      worst = std::min(worst, 1e-6 - r.parity_spread);
      constants.push_back(complex_json(r.parity_constant));
    }
    rr.tables.push_back(std::move(t));
  } else if (check == "lat") {
    const int d = c.get<int>("d"), k = c.get<int>("k"), k0 = c.get<int>("k0"), samples = c.get<int>("samples");
    CsvTable t{"wedge_lat", {"draw", "i", "j", "lhs", "rhs", "signed_error", "structural_zero"}, {}};
    for (int draw = 0; draw < draws; ++draw) {
      const auto m = block_tridiagonal(random_block(d, rng), random_block(d, rng), k);
      const int i = k0 * d + 1 + static_cast<int>(rng() % static_cast<unsigned>(d));
      const int j = (k - 1) * d + 1 + static_cast<int>(rng() % static_cast<unsigned>(d));
      const auto r = block_minor_expansion(m, d, k, i, j, k0);
      const auto z = structural_zero_check(m, d, k, i, j, k0, samples, rng());
      t.add({static_cast<double>(draw), static_cast<double>(i), static_cast<double>(j), r.lhs, r.rhs, r.signed_error, z.worst});
      (r.holds() && z.worst <= 1e-12 ? passes : failures) += 1;
      worst = std::min(worst, r.rhs > 0.0 ? (r.rhs - r.lhs) / r.rhs : -r.lhs);
      constants.push_back(num(r.rhs > 0.0 ? r.lhs / r.rhs : std::nan("")));
    }
    rr.tables.push_back(std::move(t));
  } else if (check == "bound") {
    const double theta = c.get<double>("theta"), eps = c.get<double>("eps");
    const long length = c.get<long>("length");
    CsvTable t{"wedge_bound", {"E", "y", "log_mu", "log_bound", "log_green"}, {}};
    for (double e : c.energies()) {
      LyapunovOptions lo;
      lo.iterations = 4000;
      lo.samples = 16;
      lo.seed = c.cfg.seed;
      lo.threads = c.cfg.threads;
      const auto gam = lyapunov_spectrum(dual_cocycle(c.v, c.alpha, e), 0.0, lo).exponents;
      const auto r = numerator_bound_check(c.v, c.alpha, theta, e, 0, length - 1, 0, eps, gam);
      for (std::size_t i = 0; i < r.ys.size(); ++i)
        t.add({e, static_cast<double>(r.ys[i]), r.log_mu[i], r.log_bound[i], r.log_green[i]});
      (r.worst_margin >= 0.0 ? passes : failures) += 1;
      worst = std::min(worst, r.worst_margin);
      constants.push_back({{"E", e}, {"decay_rate", num(r.decay_rate)}, {"gammas", gam}});
    }
    rr.tables.push_back(std::move(t));
  } else {
    throw ConfigError("check must be th1, lat or bound");
  }
  return {{"check", check}, {"passes", passes}, {"failures", failures}, {"worst_margin", num(worst)},
          {"empirical_C", constants}};
}

json run_localize(const Context& c, RunResult& rr) {
  const int sites = c.get<int>("sites");
  const double theta = c.get<double>("theta");
  double target = 0.0;
  if (!c.p.at("energy_index").is_null()) {
    const auto ev = truncate(c.v, c.alpha, cplx(theta), -sites, sites).eigenvalues();
    const long idx = c.get<long>("energy_index");
    if (idx < 0 || idx >= static_cast<long>(ev.size())) throw ConfigError("energy_index out of range");
    target = ev[static_cast<std::size_t>(idx)];
  } else {
    target = c.energies().front();
  }
  const auto pair = eigenpair_near(c.v, c.alpha, theta, target, sites);
  const auto set = resonances(pair.shifted_theta, c.alpha, c.get<double>("eps0"), sites);
  std::optional<double> gamma;
  if (!c.p.at("gamma").is_null()) gamma = c.get<double>("gamma");
  const auto rep = decay_report(pair, set, c.get<double>("c0"), c.get<double>("eta"),
                                denominators_beyond(c.cfg.alpha.value(), 4L * sites), gamma);

  CsvTable t{"localize", {"j", "log_abs_u", "masked"}, {}};
  const std::set<long> masked(rep.masked.begin(), rep.masked.end());
  for (long j = pair.j_min; j <= pair.j_max; ++j) {
    t.add({static_cast<double>(j), pair.log_at(j), masked.count(j) ? 1.0 : 0.0});
  }
  rr.tables.push_back(std::move(t));

  json windows = json::array();
  for (const auto& w : rep.windows)
    windows.push_back({{"n_l", w.n_l}, {"n_next", w.n_next ? json(*w.n_next) : json(nullptr)}, {"lo", num(w.lo)},
                       {"hi", w.hi < 0.0 ? json(nullptr) : num(w.hi)}});
  json rates = json::array();
  for (const auto& w : rep.window_rates)
    rates.push_back({{"n_l", w.window.n_l}, {"points", w.points}, {"rate", num(w.rate)}});
  // Regularity at bulk sites on both sides of the peak, with ξ a fraction of γ.
  json regular = json::array();
  if (gamma) {
    const long m = c.get<long>("regular_m");
    const double xi = c.get<double>("regular_xi") * *gamma;
    for (long off : {-sites / 2, -sites / 4, sites / 4, sites / 2}) {
      const long y = pair.peak + off;
      const auto w = regularity_check(c.v, c.alpha, theta, pair.energy, y, m, xi);
      regular.push_back({{"site", y}, {"regular", w.regular}, {"x1", w.x1}, {"x2", w.x2}, {"xi", num(xi)},
                         {"worst", num(w.worst)}});
    }
  }
  return {{"theta", rep.theta},
          {"energy", rep.energy},
          {"sites", rep.sites},
          {"peak", rep.peak},
          {"residual", num(pair.residual)},
          {"resonance_set", resonance_json(rep.resonance_set)},
          {"windows", windows},
          {"masked_count", rep.masked.size()},
          {"masked_decay_rate", num(rep.masked_decay_rate)},
          {"rate_stderr", num(rep.rate_stderr)},
          {"predicted_rate", gamma ? num(rep.predicted_rate) : json(nullptr)},
          {"window_rates", rates},
          {"regular_sites", regular}};
}

json pairs_json(const std::vector<std::pair<double, double>>& v) {
  json out = json::array();
  for (const auto& [r, e] : v) out.push_back({{"r", r}, {"error", num(e)}});
  return out;
}

json run_reduce(const Context& c, RunResult& rr) {
  ReduceOptions o;
  o.radii = c.get<std::vector<double>>("radii");
  o.scales = c.get<std::vector<long>>("scales");
  o.c0 = c.get<double>("c0");
  o.eta = c.get<double>("eta");
  o.sites = c.get<int>("sites");
  if (!c.p.at("theta_hint").is_null()) o.theta_hint = c.get<double>("theta_hint");
  const long horizon = c.get<long>("horizon");
  const auto dump = c.get<std::string>("dump");

  json out = json::array();
  for (double e : c.energies()) {
    const auto reps = almost_reduce(c.v, c.alpha, e, o);
    const auto set = resonances(reps.front().theta, c.alpha, c.get<double>("eps0"), horizon);
    json scales = json::array();
    for (const auto& r : reps) {
      scales.push_back({{"scale", r.scale},
                        {"N", r.n},
                        {"x1", r.x1},
                        {"x2", r.x2},
                        {"branch", r.branch},
                        {"target", r.target},
                        {"parabolic_c", complex_json(r.parabolic_c)},
                        {"resonance", r.resonance},
                        {"error_r", pairs_json(r.error_r)},
                        {"error_real_grid", num(r.error_real_grid)},
                        {"complex_error_r", pairs_json(r.complex_error_r)},
                        {"degree", r.degree},
                        {"det_floor", num(r.det_floor)},
                        {"det_drift", num(r.det_drift)},
                        {"g_norm", num(r.g_norm)},
                        {"bloch_residual", num(r.bloch_residual)},
                        {"sl2_det_error", num(r.sl2_det_error)},
                        {"offdiag_tail", num(r.offdiag_tail)},
                        {"cutoff_moved", r.cutoff_moved},
                        {"u_floor", num(r.u_floor)},
                        {"u_floor_bound", num(r.u_floor_bound)},
                        {"rho_energy", r.rho_energy},
                        {"rho_predicted", r.rho_predicted},
                        {"rho_mismatch", num(r.rho_mismatch)}});
    }
    // A scale beyond the last resonance found means the next one lies past the horizon.
    const bool beyond = set.last_nonzero() < reps.back().n;
    out.push_back({{"E", e},
                   {"energy_used", reps.front().energy},
                   {"theta", reps.front().theta},
                   {"resonance_set", resonance_json(set)},
                   {"next_resonance_beyond_horizon", beyond},
                   {"scales", scales}});
    if (!dump.empty()) {
      const long keep = reps.back().n;
      int grid = 8;
      while (grid < 4 * keep + 2) grid *= 2;
      std::filesystem::path path(dump);
      if (c.cfg.energies.size() > 1) path += "." + std::to_string(out.size() - 1);
      if (!c.cfg.out.empty() && path.is_relative()) path = std::filesystem::path(c.cfg.out) / path;
      if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
      dump_coefficients(path.string(), reps.back().conjugation, keep, grid);
      rr.binaries.push_back(path.string());
    }
  }
  return {{"reports", out}};
}

}  // namespace

RunResult run(const RunConfig& config) {
  RunConfig cfg = config;
  cfg.params = merge_params(cfg.command, cfg.params);
  const Context c(cfg);
  RunResult rr;
  json result;
  const std::string& cmd = cfg.command;
  if (cmd == "arith") result = run_arith(c, rr);
  else if (cmd == "lyapunov") result = run_lyapunov(c, rr);
  else if (cmd == "accel") result = run_accel(c, rr);
  else if (cmd == "rho") result = run_rho(c, rr);
  else if (cmd == "regime") result = run_regime(c, rr);
  else if (cmd == "det") result = run_det(c, rr);
  else if (cmd == "green") result = run_green(c, rr);
  else if (cmd == "spectrum") result = run_spectrum(c, rr);
  else if (cmd == "avgdet") result = run_avgdet(c, rr);
  else if (cmd == "wedge") result = run_wedge(c, rr);
  else if (cmd == "localize") result = run_localize(c, rr);
  else if (cmd == "reduce") result = run_reduce(c, rr);
  else throw ConfigError("unknown command '" + cmd + "'");

  rr.report = {{"version", version_string()},
               {"config", cfg.to_json()},
               {"units", {{"exponents", "nats per iterate"}, {"angles", "turns (mod 1)"}, {"h", "strip height in turns"}}},
               {"result", result}};
  return rr;
}

}  // namespace arclab
