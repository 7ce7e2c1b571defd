#include "arclab/common.hpp"

#include <algorithm>
#include <random>

namespace arclab {

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit fit;
  const std::size_t n = std::min(x.size(), y.size());
  if (n == 0) return fit;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    fit.max_residual = std::max(fit.max_residual, std::abs(r));
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / static_cast<double>(n));
  return fit;
}

double bootstrap_stderr(const std::vector<double>& values, std::uint64_t seed, int resamples) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> means;
  means.reserve(static_cast<std::size_t>(resamples));
  for (int b = 0; b < resamples; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += values[pick(rng)];
    means.push_back(s / static_cast<double>(n));
  }
  double m = 0.0;
  for (double v : means) m += v;
  m /= static_cast<double>(means.size());
  double var = 0.0;
  for (double v : means) var += (v - m) * (v - m);
  return std::sqrt(var / static_cast<double>(means.size() - 1));
}

double ordered_sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace arclab
