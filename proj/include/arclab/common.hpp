#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <thread>
#include <vector>

namespace arclab {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Distance to the nearest integer, ‖x‖_{R/Z}.
inline double torus_dist(double x) {
  const double f = x - std::floor(x);
  return std::min(f, 1.0 - f);
}

/// Representative of x mod 1 in [0, 1).
inline double mod1(double x) {
  double f = x - std::floor(x);
  return f >= 1.0 ? 0.0 : f;
}

inline cplx expi(double phase) { return std::polar(1.0, phase); }

/// e^{2πi j z} for complex z.
inline cplx fourier_mode(long j, cplx z) {
  return std::exp(cplx(0.0, kTwoPi * static_cast<double>(j)) * z);
}

/// Least-squares slope and intercept of y against x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
  double rms_residual = 0.0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Evaluates fn(i) for i in [0, n) on up to `threads` workers. Results are
/// stored by index, so any later reduction runs in grid order.
template <class T>
std::vector<T> parallel_map(std::size_t n, unsigned threads, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(n);
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  const unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) out[i] = fn(i);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

/// Bootstrap standard error of the mean, deterministic in `seed`.
double bootstrap_stderr(const std::vector<double>& values, std::uint64_t seed, int resamples = 200);

/// Sum in index order.
double ordered_sum(const std::vector<double>& v);

}  // namespace arclab
