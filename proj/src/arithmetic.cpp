#include "arclab/arithmetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <regex>

#include "arclab/common.hpp"

namespace arclab {

namespace {

// q_k beyond 2^60 needs more than 128 bits to resolve ‖q_k α‖ ~ 1/q_{k+1}.
constexpr std::int64_t kMaxDenominator = std::int64_t{1} << 60;

}  // namespace

ExtReal parse_decimal(const std::string& text) {
  static const std::regex kDecimal(R"(^\s*[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?\s*$)");
  if (!std::regex_match(text, kDecimal)) throw ConfigError("not a decimal number: '" + text + "'");
  return ExtReal(text);
}

ExtReal quadratic_surd(long a, long b, long c, long d) {
  if (d == 0) throw ConfigError("surd denominator is zero");
  if (c < 0) throw ConfigError("surd radicand is negative");
  return (ExtReal(a) + ExtReal(b) * sqrt(ExtReal(c))) / ExtReal(d);
}

ExtReal golden_mean() { return quadratic_surd(-1, 1, 5, 2); }

std::vector<std::int64_t> ContinuedFraction::denominators() const {
  std::vector<std::int64_t> q;
  q.reserve(convergents.size());
  for (const auto& c : convergents) q.push_back(c.q);
  return q;
}

ContinuedFraction continued_fraction(const ExtReal& alpha, int depth) {
  if (!(alpha > 0 && alpha < 1)) throw ConfigError("alpha must lie in (0,1)");
  if (depth < 1) throw ConfigError("depth must be positive");

  const ExtReal floor_tol = ldexp(ExtReal(1), -kExtPrecisionBits / 2);
  ContinuedFraction cf;
  cf.alpha = alpha;
  cf.convergents.push_back({0, 1});

  ExtReal ak = alpha;  // α_{k-1}
  std::int64_t p2 = 1, q2 = 0;  // p_{-1}, q_{-1}
  std::int64_t p1 = 0, q1 = 1;  // p_0, q_0
  for (int k = 1; k <= depth; ++k) {
    if (ak < floor_tol) {
      throw PrecisionExhausted(k - 1, "alpha_" + std::to_string(k - 1) +
                                          " below 2^-64; alpha is rational or precision is too low");
    }
    const ExtReal inv = 1 / ak;
    const ExtReal a_floor = floor(inv);
    if (a_floor > ExtReal(kMaxDenominator)) {
      throw PrecisionExhausted(k, "partial quotient a_" + std::to_string(k) + " exceeds 2^60");
    }
    const auto a = static_cast<std::int64_t>(a_floor);
    const __int128 p = static_cast<__int128>(a) * p1 + p2;
    const __int128 q = static_cast<__int128>(a) * q1 + q2;
    if (q > kMaxDenominator) {
      throw PrecisionExhausted(k, "q_" + std::to_string(k) + " exceeds 2^60");
    }
    cf.partial_quotients.push_back(a);
    cf.convergents.push_back({static_cast<std::int64_t>(p), static_cast<std::int64_t>(q)});
    p2 = p1;
    q2 = q1;
    p1 = static_cast<std::int64_t>(p);
    q1 = static_cast<std::int64_t>(q);
    ak = inv - a_floor;
  }
  return cf;
}

ExtReal approximation_error(const ContinuedFraction& cf, int k) {
  const ExtReal x = ExtReal(cf.convergents.at(static_cast<std::size_t>(k)).q) * cf.alpha;
  const ExtReal f = x - floor(x);
  return f < ExtReal(0.5) ? f : 1 - f;
}

double beta_estimate(const ContinuedFraction& cf, int tail_start) {
  const auto& c = cf.convergents;
  double best = 0.0;
  for (std::size_t k = static_cast<std::size_t>(std::max(tail_start, 0)); k + 1 < c.size(); ++k) {
    const double v = std::log(static_cast<double>(c[k + 1].q)) / static_cast<double>(c[k].q);
    best = std::max(best, v);
  }
  return best;
}

std::vector<long> ResonanceSet::indices() const {
  std::vector<long> out;
  out.reserve(resonances.size());
  for (const auto& r : resonances) out.push_back(r.n);
  return out;
}

long ResonanceSet::last_nonzero() const {
  long best = 0;
  for (const auto& r : resonances) best = std::max(best, std::labs(r.n));
  return best;
}

ResonanceSet resonances(double theta, double alpha, double eps0, long horizon) {
  if (!(eps0 > 0.0)) throw ConfigError("eps0 must be positive");
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  ResonanceSet set{theta, eps0, horizon, {}};
  const auto dist = [&](long n) { return torus_dist(2.0 * theta - static_cast<double>(n) * alpha); };

  double running_min = dist(0);
  set.resonances.push_back({0, running_min});
  for (long m = 1; m <= horizon; ++m) {
    const double dp = dist(m), dm = dist(-m);
    const double shell_min = std::min(dp, dm);
    const double bound = std::exp(-eps0 * static_cast<double>(m));
    std::vector<Resonance> shell;
    for (const auto& cand : {Resonance{m, dp}, Resonance{-m, dm}}) {
      if (cand.distance <= bound && cand.distance <= running_min && cand.distance <= shell_min) {
        shell.push_back(cand);
      }
    }
    std::sort(shell.begin(), shell.end(), [](const Resonance& a, const Resonance& b) {
      if (a.distance != b.distance) return a.distance < b.distance;
      return a.n > b.n;
    });
    set.resonances.insert(set.resonances.end(), shell.begin(), shell.end());
    running_min = std::min(running_min, shell_min);
  }
  return set;
}

ResonanceSet resonances(double theta, const ContinuedFraction& cf, double eps0, long horizon) {
  return resonances(theta, cf.alpha_double(), eps0, horizon);
}

}  // namespace arclab
