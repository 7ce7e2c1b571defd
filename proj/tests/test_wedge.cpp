#include <cmath>
#include <random>

#include "arclab/arithmetic.hpp"
#include "arclab/cocycle.hpp"
#include "arclab/wedge.hpp"
#include "doctest.h"

using namespace arclab;

namespace {

const double kGolden = golden_mean().convert_to<double>();

TrigPolynomial random_potential(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<cplx> v{cplx(g(rng), 0.0)};
  for (int k = 1; k <= d; ++k) v.emplace_back(g(rng), g(rng));
  v.back() += cplx(1.0, 0.0);
  return TrigPolynomial::from_nonnegative(v);
}

Eigen::MatrixXcd random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = cplx(g(rng), g(rng));
  return m;
}

// Entry (r, c) of L − E on sites r, c, straight from the definition.
cplx dual_entry(const TrigPolynomial& v, double alpha, double theta, double e, long r, long c) {
  const long k = c - r;
  cplx out = std::labs(k) <= v.degree() ? v.coeff(static_cast<int>(k)) : cplx(0.0);
  if (k == 0) out += 2.0 * std::cos(kTwoPi * (theta + static_cast<double>(r) * alpha)) - e;
  return out;
}

}  // namespace

TEST_CASE("combinations and exterior powers") {
  CHECK(combinations(4, 2).size() == 6);
  CHECK(combinations(4, 2)[1] == std::vector<int>{0, 2});
  CHECK(combinations(3, 0).size() == 1);
  CHECK(combinations(2, 3).empty());

  std::mt19937_64 rng(3);
  for (int d = 1; d <= 3; ++d) {
    for (int m = 1; m <= d; ++m) {
      const auto a = random_matrix(2 * d, rng), b = random_matrix(2 * d, rng);
      const Eigen::MatrixXcd lhs = exterior_power(a * b, m);
      const Eigen::MatrixXcd rhs = exterior_power(a, m) * exterior_power(b, m);
      CHECK((lhs - rhs).norm() <= 1e-10 * rhs.norm());
    }
  }
  const auto a = random_matrix(4, rng);
  CHECK((exterior_power(a, 1) - a).norm() == 0.0);
  CHECK(std::abs(exterior_power(a, 4)(0, 0) - a.determinant()) <= 1e-12 * std::abs(a.determinant()));
}

TEST_CASE("request validation") {
  WedgeMinorRequest r{2, {-2, 1}, {0, 1}, 3};
  CHECK_NOTHROW(r.validate(2));
  CHECK_THROWS_AS(r.validate(1), IndexOutOfRange);
  r.rows = {1, -2};
  CHECK_THROWS_AS(r.validate(2), IndexOutOfRange);
  r.rows = {-3, 0};
  CHECK_THROWS_AS(r.validate(2), IndexOutOfRange);
  r.rows = {0};
  CHECK_THROWS_AS(r.validate(2), IndexOutOfRange);
}

TEST_CASE("wedge minors of dual transfer products") {
  std::mt19937_64 rng(5);
  const auto amo = TrigPolynomial::amo(0.5);

  // k = 0 gives identity minors.
  const auto v2 = random_potential(2, rng);
  CHECK(wedge_minor_Q(v2, kGolden, cplx(0.3), 0.2, {2, {-2, 1}, {-2, 1}, 0}).value() == cplx(1.0));
  CHECK(wedge_minor_Q(v2, kGolden, cplx(0.3), 0.2, {2, {-2, 1}, {-1, 1}, 0}).is_zero());

  // d = 1, m = 1: the plain entries; position of δ_0 is row 0, δ_{−1} is row 1.
  const auto c1 = dual_cocycle(amo, kGolden, 0.4);
  const MatC a1 = transfer_product(c1, cplx(0.17), 7).value();
  for (int i = -1; i <= 0; ++i)
    for (int j = -1; j <= 0; ++j) {
      const cplx q = wedge_minor_Q(amo, kGolden, cplx(0.17), 0.4, {1, {i}, {j}, 7}).value();
      CHECK(std::abs(q - a1(-i, -j)) <= 1e-12 * a1.norm());
    }

  // d = 2, m = 2, k = 6 against the product of Λ² of the one-step matrices.
  for (int trial = 0; trial < 10; ++trial) {
    const auto v = random_potential(2, rng);
    const double theta = std::uniform_real_distribution<double>(0, 1)(rng);
    const double e = std::uniform_real_distribution<double>(-2, 2)(rng);
    const auto c = dual_cocycle(v, kGolden, e);
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Identity(6, 6);
    for (int s = 0; s < 6; ++s) w = exterior_power(c(cplx(theta + s * kGolden)), 2) * w;
    const auto pairs = combinations(4, 2);
    for (std::size_t r = 0; r < pairs.size(); ++r)
      for (std::size_t col = 0; col < pairs.size(); ++col) {
        // Positions p map to indices d − 1 − p.
        std::vector<int> rows{1 - pairs[r][1], 1 - pairs[r][0]};
        std::vector<int> cols{1 - pairs[col][1], 1 - pairs[col][0]};
        const cplx q = wedge_minor_Q(v, kGolden, cplx(theta), e, {2, rows, cols, 6}).value();
        CHECK(std::abs(q - w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col))) <=
              1e-9 * w.norm());
      }
  }
}

TEST_CASE("exterior square growth matches the top two exponents") {
  const auto v = TrigPolynomial::from_nonnegative({cplx(0.3), cplx(0.5), cplx(0.25)});
  const auto c = dual_cocycle(v, kGolden, 0.1);
  LyapunovOptions opts;
  opts.iterations = 4000;
  opts.samples = 4;
  const auto lyap = lyapunov_spectrum(c, 0.0, opts);

  // Renormalized Λ² product along the orbit, averaged over the same phases.
  const auto phases = phase_grid(opts.samples, opts.seed);
  double total = 0.0;
  for (double th : phases) {
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Identity(6, 6);
    double log_norm = 0.0;
    for (long s = 0; s < opts.iterations; ++s) {
      w = exterior_power(c(cplx(th + static_cast<double>(s) * kGolden)), 2) * w;
      const double n = w.norm();
      w /= n;
      log_norm += std::log(n);
    }
    total += log_norm / static_cast<double>(opts.iterations);
  }
  const double growth = total / static_cast<double>(phases.size());
  CHECK(std::abs(growth - (lyap.raw_exponents[0] + lyap.raw_exponents[1])) < 0.02);
}

TEST_CASE("general truncated determinants") {
  std::mt19937_64 rng(9);
  const auto v = random_potential(2, rng);
  const double theta = 0.23, e = 0.4;

  std::vector<long> sq;
  for (long r = 0; r < 9; ++r) sq.push_back(r);
  const cplx a = general_truncated_det(v, kGolden, cplx(theta), e, sq, sq).value();
  const cplx b = det_P(v, kGolden, cplx(theta), e, 9).value();
  CHECK(std::abs(a - b) <= 1e-10 * std::abs(b));

  // Cofactor of the dense section.
  Eigen::MatrixXcd m(9, 9);
  for (long r = 0; r < 9; ++r)
    for (long c = 0; c < 9; ++c) m(r, c) = dual_entry(v, kGolden, theta, e, r, c);
  std::vector<long> rows, cols;
  std::vector<int> ir, ic;
  for (long t = 0; t < 9; ++t) {
    if (t != 4) rows.push_back(t), ir.push_back(static_cast<int>(t));
    if (t != 6) cols.push_back(t), ic.push_back(static_cast<int>(t));
  }
  const cplx cof = submatrix(m, ir, ic).determinant();
  CHECK(std::abs(general_truncated_det(v, kGolden, cplx(theta), e, rows, cols).value() - cof) <= 1e-10 * std::abs(cof));

  // Extended column set for d = 2, k = 8.
  const WedgeMinorRequest req{1, {0}, {-1}, 8};
  const auto tc = th1_columns(2, 8, req);
  CHECK(tc == std::vector<long>{-1, 2, 3, 4, 5, 6, 7, 9});
  Eigen::MatrixXcd ext(8, 8);
  for (long r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < tc.size(); ++c)
      ext(r, static_cast<Eigen::Index>(c)) = dual_entry(v, kGolden, theta, e, r, tc[c]);
  const cplx d8 = ext.determinant();
  CHECK(std::abs(th1_determinant(v, kGolden, cplx(theta), e, req).value() - d8) <= 1e-10 * std::abs(d8));

  CHECK_THROWS_AS(general_truncated_det(v, kGolden, cplx(theta), e, {0, 1}, {0}), IndexOutOfRange);
  CHECK_THROWS_AS(th1_columns(2, 3, req), IndexOutOfRange);
}

TEST_CASE("wedge minor over truncated determinant is constant") {
  const std::vector<double> energies{-1.3, -0.4, 0.2, 0.7, 1.6};
  const std::vector<double> thetas{0.11, 0.47, 0.83};
  const std::vector<long> ks{4, 6, 8};

  const auto r1 = th1_ratio_check(TrigPolynomial::amo(0.5), kGolden, energies, thetas, ks, {1, {0}, {-1}, 0});
  CHECK(r1.samples.size() + static_cast<std::size_t>(r1.skipped) == 45);
  CHECK(r1.parity_spread <= 1e-6);
  CHECK(std::abs(std::abs(r1.parity_constant) - 1.0) < 1e-6);

  std::mt19937_64 rng(21);
  const auto v = random_potential(2, rng);
  for (const WedgeMinorRequest& req : {WedgeMinorRequest{1, {0}, {-1}, 0}, WedgeMinorRequest{2, {-1, 1}, {-2, 0}, 0},
                                       WedgeMinorRequest{1, {-2}, {1}, 0}}) {
    const auto r2 = th1_ratio_check(v, kGolden, energies, thetas, ks, req);
    CHECK(r2.samples.size() >= 40);
    CHECK(r2.parity_spread <= 1e-6);
    CHECK(std::abs(std::abs(r2.parity_constant) - 1.0) < 1e-6);
  }
}

TEST_CASE("zero sets in the energy agree") {
  std::mt19937_64 rng(33);
  const auto v = random_potential(2, rng);
  const auto rep = zero_set_correspondence(v, kGolden, 0.37, {1, {0}, {-1}, 6});
  CHECK(!rep.q_roots.empty());
  CHECK(rep.q_roots.size() == rep.det_roots.size());
  CHECK(rep.distance <= 1e-6);

  // Root finder on a known cubic.
  const auto roots = polynomial_roots([](double e) { return cplx((e - 1) * (e + 0.5) * (e - 2.5)); }, 5, 4.0);
  CHECK(roots.size() == 3);
  CHECK(hausdorff_complex(roots, {cplx(1), cplx(-0.5), cplx(2.5)}) < 1e-10);
}

TEST_CASE("block minor expansion") {
  std::mt19937_64 rng(41);
  // d = 1: every term is a product of scalar cofactors.
  {
    const auto a = random_matrix(1, rng), b = random_matrix(1, rng);
    const auto m = block_tridiagonal(a, b, 20);
    const auto r = block_minor_expansion(m, 1, 20, 6, 20, 5);
    CHECK(r.holds());
    CHECK(r.signed_error < 1e-10);
  }
  int violations = 0;
  double worst_signed = 0.0;
  for (int draw = 0; draw < 50; ++draw) {
    const auto a = random_matrix(2, rng), b = random_matrix(2, rng);
    const auto m = block_tridiagonal(a, b, 20);
    const int i = 11 + draw % 2, j = 39 + (draw / 2) % 2;
    const auto r = block_minor_expansion(m, 2, 20, i, j, 5);
    if (!r.holds()) ++violations;
    worst_signed = std::max(worst_signed, r.signed_error);
  }
  CHECK(violations == 0);
  CHECK(worst_signed < 1e-10);

  const auto m = block_tridiagonal(random_matrix(2, rng), random_matrix(2, rng), 20);
  CHECK_THROWS_AS(block_minor_expansion(m, 2, 20, 5, 40, 5), ConfigError);
  CHECK_THROWS_AS(block_minor_expansion(m, 2, 20, 25, 40, 12), ConfigError);
}

TEST_CASE("excluded column patterns vanish") {
  std::mt19937_64 rng(43);
  const auto m = block_tridiagonal(random_matrix(2, rng), random_matrix(2, rng), 20);
  const auto z = structural_zero_check(m, 2, 20, 11, 40, 5, 100, 7);
  CHECK(z.checked == 200);
  CHECK(z.worst <= 1e-12);
}

TEST_CASE("Green's function numerators obey the exponential bound") {
  const auto amo = TrigPolynomial::amo(0.5);
  const double e = 0.1;
  const double gamma = std::log(2.0);
  const auto rep = numerator_bound_check(amo, kGolden, 0.21, e, 0, 119, 0, 0.1, {gamma});
  CHECK(rep.worst_margin >= 0.0);
  CHECK(std::abs(rep.decay_rate - gamma) <= 0.15 * gamma);

  // λ = 1/4 pushes the exponent to ln 4.
  const auto quarter = TrigPolynomial::amo(0.25);
  const auto rep4 = numerator_bound_check(quarter, kGolden, 0.21, e, 0, 119, 0, 0.1, {std::log(4.0)});
  CHECK(rep4.worst_margin >= 0.0);
  CHECK(std::abs(rep4.decay_rate - std::log(4.0)) <= 0.15 * std::log(4.0));

  CHECK_THROWS_AS(numerator_bound_check(amo, kGolden, 0.21, e, 0, 20, 0, 0.1, {gamma}), ConfigError);
}
