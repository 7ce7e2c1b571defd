#include <cmath>
#include <random>

#include "arclab/arithmetic.hpp"
#include "arclab/cocycle.hpp"
#include "arclab/operators.hpp"
#include "doctest.h"

using namespace arclab;

namespace {

const double kGolden = golden_mean().convert_to<double>();

TrigPolynomial random_potential(int d, std::mt19937_64& rng, bool real = false) {
  std::normal_distribution<double> g;
  std::vector<cplx> v{cplx(g(rng), 0.0)};
  for (int k = 1; k <= d; ++k) v.emplace_back(g(rng), real ? 0.0 : g(rng));
  return TrigPolynomial::from_nonnegative(v);
}

// Entrywise assembly of (L u)_n = Σ V_k u_{n+k} + 2cos2π(θ+nα) u_n on [x1, x2].
Eigen::MatrixXcd dense_dual(const TrigPolynomial& v, double alpha, cplx theta, long x1, long x2) {
  const long n = x2 - x1 + 1;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (long a = 0; a < n; ++a) {
    for (long b = 0; b < n; ++b) {
      const long k = b - a;
      if (std::labs(k) <= v.degree()) m(a, b) += v.coeff(static_cast<int>(k));
    }
    m(a, a) += 2.0 * std::cos(kTwoPi * (theta + static_cast<double>(x1 + a) * alpha));
  }
  return m;
}

}  // namespace

TEST_CASE("section assembly") {
  const auto amo = TrigPolynomial::amo(0.5);
  const double theta = 0.123;
  const auto one = truncate(amo, kGolden, cplx(theta), 0, 0);
  CHECK(one.size() == 1);
  CHECK(std::abs(one.entry(0, 0) - 2.0 * std::cos(kTwoPi * theta)) < 1e-15);

  const auto three = truncate(amo, kGolden, cplx(theta), 0, 2).dense();
  CHECK(three(0, 1) == cplx(0.5));
  CHECK(three(1, 2) == cplx(0.5));
  CHECK(three(2, 1) == cplx(0.5));
  CHECK(three(0, 2) == cplx(0.0));

  std::mt19937_64 rng(1);
  const auto v = random_potential(2, rng);
  const auto sec = truncate(v, kGolden, cplx(0.3, 0.01), 0, 9);
  CHECK((sec.dense() - dense_dual(v, kGolden, cplx(0.3, 0.01), 0, 9)).norm() < 1e-14);

  const auto herm = truncate(v, kGolden, cplx(0.3), -20, 20).dense();
  CHECK((herm - herm.adjoint()).norm() <= 1e-12 * herm.norm());
  CHECK_THROWS_AS(truncate(v, kGolden, cplx(0.3), 5, 4), ConfigError);
}

TEST_CASE("one-site determinant") {
  const auto amo = TrigPolynomial::amo(0.5);
  const double theta = 0.41, e = 0.2;
  const auto p = det_P(amo, kGolden, cplx(theta), e, 1).value();
  CHECK(std::abs(p - (2.0 * std::cos(kTwoPi * theta) - e)) < 1e-14);
}

TEST_CASE("banded determinant matches dense determinant") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> th(0.0, 1.0), en(-3.0, 3.0);
  const auto amo = TrigPolynomial::amo(0.5);
  for (int i = 0; i < 100; ++i) {
    const double theta = th(rng), e = en(rng);
    Eigen::MatrixXcd m = dense_dual(amo, kGolden, cplx(theta), 0, 49);
    m.diagonal().array() -= e;
    const cplx dense = m.determinant();
    const cplx banded = det_P(amo, kGolden, cplx(theta), e, 50).value();
    CHECK(std::abs(banded - dense) <= 1e-9 * std::abs(dense));
  }
  // Large sections stay finite in log form.
  const auto big = det_P(amo, kGolden, cplx(0.2), 0.1, 5000);
  CHECK(std::isfinite(big.log_abs));
}

TEST_CASE("schrodinger transfer matrix entries are truncated determinants") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> th(0.0, 1.0), en(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto v = random_potential(2, rng, true);
    const double theta = th(rng), e = en(rng);
    const auto c = schrodinger_cocycle(v, kGolden, e);
    const auto p = [&](double t, long n) {
      // det(E − H) = (−1)^n det(H − E).
      const cplx s = (n % 2 == 0) ? 1.0 : -1.0;
      return s * det_P_schrodinger(v, kGolden, cplx(t), e, n).value();
    };
    for (long k = 1; k <= 12; ++k) {
      const MatC a = transfer_product(c, cplx(theta), k).value();
      const double scale = a.norm();
      CHECK(std::abs(a(0, 0) - p(theta, k)) <= 1e-8 * scale);
      CHECK(std::abs(a(0, 1) + p(theta + kGolden, k - 1)) <= 1e-8 * scale);
      CHECK(std::abs(a(1, 0) - p(theta, k - 1)) <= 1e-8 * scale);
      CHECK(std::abs(a(1, 1) + p(theta + kGolden, k - 2)) <= 1e-8 * scale);
    }
  }
}

TEST_CASE("determinant is a degree-n trigonometric polynomial in theta") {
  const auto amo = TrigPolynomial::amo(0.5);
  const long n = 8;
  const int m = 64;
  std::vector<cplx> vals;
  for (int j = 0; j < m; ++j) vals.push_back(det_P(amo, kGolden, cplx(static_cast<double>(j) / m), 0.3, n).value());
  double inside = 0.0, outside = 0.0;
  for (int f = -m / 2; f < m / 2; ++f) {
    cplx s = 0.0;
    for (int j = 0; j < m; ++j) s += vals[static_cast<std::size_t>(j)] * std::exp(cplx(0.0, -kTwoPi * f * j / m));
    s /= static_cast<double>(m);
    (std::abs(f) <= n ? inside : outside) = std::max(std::abs(f) <= n ? inside : outside, std::abs(s));
  }
  CHECK(outside <= 1e-8 * inside);
}

TEST_CASE("two-site Green's function") {
  const double lambda = 0.5, theta = 0.1, e = 0.05;
  const auto sec = truncate(TrigPolynomial::amo(lambda), kGolden, cplx(theta), 0, 1);
  const double a = 2.0 * std::cos(kTwoPi * theta) - e, b = 2.0 * std::cos(kTwoPi * (theta + kGolden)) - e;
  const double det = a * b - lambda * lambda;
  const auto t = greens(sec, e, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  CHECK(std::abs(t.entries[0].g - b / det) < 1e-14);
  CHECK(std::abs(t.entries[1].g + lambda / det) < 1e-14);
  CHECK(std::abs(t.entries[2].g + lambda / det) < 1e-14);
  CHECK(std::abs(t.entries[3].g - a / det) < 1e-14);
  CHECK(std::abs(t.p.value() - det) < 1e-14);
}

TEST_CASE("Cramer identity against a dense solve") {
  std::mt19937_64 rng(8);
  const auto v = random_potential(2, rng);
  const auto sec = truncate(v, kGolden, cplx(0.27), 0, 23);
  const double e = 0.37;
  std::vector<std::pair<long, long>> pairs;
  for (long x = 0; x < 24; x += 3)
    for (long y = 0; y < 24; y += 5) pairs.emplace_back(x, y);
  const auto t = greens(sec, e, pairs);
  Eigen::MatrixXcd m = sec.dense();
  m.diagonal().array() -= e;
  const Eigen::MatrixXcd inv = m.inverse();
  for (const auto& entry : t.entries) {
    CHECK(std::abs(entry.g - inv(entry.x, entry.y)) <= 1e-8 * inv.cwiseAbs().maxCoeff());
  }
  CHECK(t.max_cramer_error() < 1e-8);
}

TEST_CASE("near-singular sections are rejected") {
  const auto sec = truncate(TrigPolynomial::amo(0.5), kGolden, cplx(0.2), 0, 40);
  const auto w = sec.eigenvalues();
  CHECK_THROWS_AS(greens(sec, w[10], {{0, 0}}), NumericError);
}

TEST_CASE("eigenvector reconstruction from boundary values") {
  std::mt19937_64 rng(12);
  const auto v = random_potential(2, rng);
  const auto big = truncate(v, kGolden, cplx(0.31), 0, 199);
  const auto w = big.eigenvalues();
  const double e = w[100];
  const Eigen::VectorXcd u = big.eigenvector(e);
  Eigen::MatrixXcd m = big.dense();
  m.diagonal().array() -= e;
  CHECK((m * u).norm() < 1e-10);

  const auto inner = truncate(v, kGolden, cplx(0.31), 60, 90);
  CHECK(boundary_expansion_error(inner, e, u, 0) < 1e-8);
}

TEST_CASE("spectrum samples") {
  const auto free = spectrum_sample(TrigPolynomial::constant(0.0), kGolden, 200, 1);
  // V = 0 dual section: 2cos on the diagonal and no hopping; use the Schrödinger side for the free Laplacian.
  const auto lap = spectrum_sample_schrodinger(TrigPolynomial::constant(0.0), kGolden, 200, 2);
  CHECK(lap.front() >= -2.0);
  CHECK(lap.back() <= 2.0);
  CHECK(lap.size() == 400);
  CHECK(free.front() >= -2.0 - 1e-12);

  const auto crit = spectrum_sample(TrigPolynomial::amo(1.0), kGolden, 400, 4);
  CHECK(crit.front() >= -4.0);
  CHECK(crit.back() <= 4.0);

  CHECK(hausdorff({0.0, 1.0}, {0.0, 0.5, 1.0}) == doctest::Approx(0.5));
  CHECK(in_spectrum(0.5001, {0.0, 0.5, 1.0}, 2000));
  CHECK_FALSE(in_spectrum(0.6, {0.0, 0.5, 1.0}, 2000));
}

TEST_CASE("averaged log-determinant") {
  const auto amo = TrigPolynomial::amo(0.5);
  const auto a0 = avg_log_det(amo, kGolden, 0.0, 60, 0.0, 64);
  const auto a1 = avg_log_det(amo, kGolden, 0.0, 60, 0.05, 64);
  CHECK(std::isfinite(a0.value));
  CHECK(a1.value >= a0.value - 0.01);
  CHECK(a0.retries == 0);
}
