#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "arclab/error.hpp"

namespace arclab {

/// 128-bit significand. Double precision corrupts q_k past k ≈ 35 for generic α.
using ExtReal = boost::multiprecision::number<
    boost::multiprecision::backends::cpp_bin_float<128, boost::multiprecision::backends::digit_base_2>,
    boost::multiprecision::et_off>;

inline constexpr int kExtPrecisionBits = 128;

/// Parses a decimal string ("0.6180339887...") at extended precision.
ExtReal parse_decimal(const std::string& text);

/// (a + b·√c) / d at extended precision.
ExtReal quadratic_surd(long a, long b, long c, long d);

ExtReal golden_mean();  // (√5 − 1)/2

struct Convergent {
  std::int64_t p = 0;
  std::int64_t q = 1;
};

/// Continued-fraction expansion α = [0; a_1, a_2, ...].
///
/// partial_quotients[k-1] = a_k for k = 1..depth; convergents[k] = p_k/q_k for
/// k = 0..depth with p_0 = 0, q_0 = 1, p_1 = 1, q_1 = a_1.
struct ContinuedFraction {
  ExtReal alpha;
  std::vector<std::int64_t> partial_quotients;
  std::vector<Convergent> convergents;

  int depth() const { return static_cast<int>(partial_quotients.size()); }
  double alpha_double() const { return static_cast<double>(alpha); }
  std::vector<std::int64_t> denominators() const;
};

/// Thrown when α_k falls below 2^{-precision/2} before `depth` is reached, or
/// when q_k outgrows what the working precision resolves.
class PrecisionExhausted : public NumericError {
 public:
  PrecisionExhausted(int k, const std::string& what)
      : NumericError("PrecisionExhausted", what), k_(k) {}
  int at_k() const noexcept { return k_; }

 private:
  int k_;
};

ContinuedFraction continued_fraction(const ExtReal& alpha, int depth);

/// ‖q_k α‖ at extended precision.
ExtReal approximation_error(const ContinuedFraction& cf, int k);

/// max over k ≥ tail_start of ln(q_{k+1})/q_k. With tail_start = 0 this is the
/// full finite-depth proxy for β(α); larger tail_start gives the tail supremum,
/// which tends to 0 for Diophantine α.
double beta_estimate(const ContinuedFraction& cf, int tail_start = 0);

struct Resonance {
  long n = 0;
  double distance = 0.0;  // ‖2θ − nα‖
};

struct ResonanceSet {
  double theta = 0.0;
  double eps0 = 0.0;
  long horizon = 0;
  std::vector<Resonance> resonances;  // ordered by |n|

  std::vector<long> indices() const;
  /// Largest |n| among nonzero resonances, 0 if none.
  long last_nonzero() const;
};

/// All ε₀-resonances of θ with |n| ≤ K: ‖2θ − nα‖ ≤ e^{−ε₀|n|} and minimal over
/// |m| ≤ |n|. Within equal |n| the smaller distance comes first, then positive n.
ResonanceSet resonances(double theta, double alpha, double eps0, long horizon);
ResonanceSet resonances(double theta, const ContinuedFraction& cf, double eps0, long horizon);

}  // namespace arclab
