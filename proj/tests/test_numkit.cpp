#include <doctest.h>

#include <cmath>
#include <set>

#include "core/linalg.hpp"
#include "core/rng.hpp"
#include "core/special.hpp"
#include "oracles.hpp"

using namespace rfts;
using namespace rfts::numkit;

TEST_CASE("normal_cdf matches symmetry and the quadrature oracle") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(normal_cdf(1.959963985) == doctest::Approx(0.975).epsilon(1e-9));
  CHECK(normal_cdf(-8.0) < 1e-14);
  // complementary-error-function series bound on the tail
  CHECK(normal_cdf(-8.0) < oracle::normal_pdf(8.0) / 8.0);

  for (double x = -6.0; x <= 6.0; x += 0.37)
    CHECK(std::fabs(normal_cdf(x) - oracle::normal_cdf_quadrature(x)) < 1e-9);
}

TEST_CASE("normal_cdf is nondecreasing on a fine grid") {
  double prev = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double x = -10.0 + 20.0 * i / 9999.0;
    const double v = normal_cdf(x);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("normal_quantile: median, frozen 5% point, round trip") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(normal_quantile(0.05) == doctest::Approx(-1.6448536).epsilon(1e-7));
  const double bisected =
      oracle::bisect_quantile([](double x) { return normal_cdf(x); }, 0.05, -10, 10);
  CHECK(normal_quantile(0.05) == doctest::Approx(bisected).epsilon(1e-9));

  for (double p : {0.01, 0.5, 0.99})
    CHECK(std::fabs(normal_cdf(normal_quantile(p)) - p) <= 1e-8);
  for (double p : {1e-12, 1e-6, 0.2, 0.8, 1.0 - 1e-6})
    CHECK(std::fabs(normal_cdf(normal_quantile(p)) - p) <= 1e-8 * std::max(p, 1.0 - p));

  CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(normal_quantile(1.0), std::invalid_argument);
  CHECK_THROWS_AS(normal_quantile(-0.2), std::invalid_argument);
}

TEST_CASE("binomial_cdf: trivial points and the exact-summation oracle") {
  CHECK(binomial_cdf(0, 1, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(binomial_cdf(5, 10, 0.5) == doctest::Approx(0.623046875).epsilon(1e-13));
  CHECK(binomial_cdf(7, 7, 0.5) == 1.0);
  CHECK(binomial_cdf(12345, 12345, 0.37) == 1.0);
  CHECK_THROWS_AS(binomial_cdf(11, 10, 0.5), std::invalid_argument);

  // p = 1/2 against exact rational arithmetic
  for (long long m : {1, 2, 7, 33, 100, 999, 10000}) {
    for (long long k : {0LL, 1LL, m / 4, m / 2, m - 1}) {
      if (k > m) continue;
      const double exact = oracle::binomial_half_cdf(k, m);
      CHECK(std::fabs(binomial_cdf(k, m, 0.5) - exact) <= 1e-12);
    }
  }
  // asymmetric p against 100-digit summation
  for (double p : {0.1, 0.37, 0.9}) {
    for (long long m : {10LL, 250LL}) {
      for (long long k = 0; k <= m; k += m / 5) {
        const double hp = oracle::binomial_cdf_highprec(k, m, p);
        CHECK(std::fabs(binomial_cdf(k, m, p) - hp) <= 1e-12);
      }
    }
  }
  // contract extends to m = 1e5
  const long long big = 100000;
  for (long long k : {big / 2 - 300, big / 2, big / 2 + 300}) {
    const double exact = oracle::binomial_half_cdf(k, big);
    CHECK(std::fabs(binomial_cdf(k, big, 0.5) - exact) <= 1e-12);
  }
}

TEST_CASE("binomial_quantile: smallest k with cdf >= alpha") {
  CHECK(binomial_quantile(0.9999999, 10, 0.5) == 10);
  CHECK(binomial_quantile(0.5, 1, 0.5) == 0);

  // frozen after confirming with the exact-summation oracle: the cdf at 41
  // is ~0.0443 < 0.05, so the 5% quantile of Binomial(100, 1/2) is 42
  const auto row = oracle::binomial_half_cdf_row(100);
  long long expect = 0;
  while (row[static_cast<std::size_t>(expect)] < 0.05) ++expect;
  CHECK(row[41] < 0.05);
  CHECK(expect == 42);
  CHECK(binomial_quantile(0.05, 100, 0.5) == expect);
  CHECK(binomial_quantile(0.05, 100, 0.5) == 42);

  CHECK_THROWS_AS(binomial_quantile(0.0, 10, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(binomial_quantile(1.0, 10, 0.5), std::invalid_argument);
}

TEST_CASE("student_t_cdf: symmetry, Cauchy closed form, quadrature") {
  for (double nu : {0.5, 1.0, 3.0, 30.0}) CHECK(student_t_cdf(0.0, nu) == 0.5);
  CHECK(student_t_cdf(1.0, 1.0) == doctest::Approx(0.75).epsilon(1e-10));
  CHECK(student_t_cdf(1e308, 3.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(student_t_cdf(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(student_t_cdf(1.0, -2.0), std::invalid_argument);

  for (double x = -5.0; x <= 5.0; x += 0.41) {
    const double cauchy = 0.5 + std::atan(x) / M_PI;
    CHECK(std::fabs(student_t_cdf(x, 1.0) - cauchy) <= 1e-8);
  }
  // nu = 3 against quadrature of the t density (anchor far enough out that
  // the truncated tail mass, ~3 c / |a|^3, is negligible)
  const double norm3 = std::tgamma(2.0) / (std::sqrt(3.0 * M_PI) * std::tgamma(1.5));
  auto density3 = [&](double t) { return norm3 * std::pow(1.0 + t * t / 3.0, -2.0); };
  for (double x : {-2.5, -0.7, 0.3, 1.9}) {
    const double quad = oracle::adaptive_simpson(density3, -20000.0, x, 1e-12);
    CHECK(std::fabs(student_t_cdf(x, 3.0) - quad) <= 1e-8);
  }
}

TEST_CASE("gamma_sample: moment identities and determinism") {
  auto empirical_mean = [](double shape, double rate, int n) {
    RngStream rng(123, 7);
    double s = 0;
    for (int i = 0; i < n; ++i) s += gamma_sample(shape, rate, rng);
    return s / n;
  };
  CHECK(empirical_mean(1.0, 1.0, 100000) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(empirical_mean(2.5, 2.5, 100000) == doctest::Approx(1.0).epsilon(0.02));
  // shape < 1 exercises the power-transform boost; 3 standard errors
  const double se = std::sqrt(0.5 / 0.25 / 100000.0);
  CHECK(std::fabs(empirical_mean(0.5, 0.5, 100000) - 1.0) < 3 * se);

  RngStream a(99, 3), b(99, 3);
  for (int i = 0; i < 100; ++i)
    CHECK(gamma_sample(0.7, 2.0, a) == gamma_sample(0.7, 2.0, b));
  CHECK_THROWS_AS(gamma_sample(0.0, 1.0, a), std::invalid_argument);
  CHECK_THROWS_AS(gamma_sample(1.0, -1.0, a), std::invalid_argument);
}

TEST_CASE("cholesky: hand example, identity, singular failure") {
  Matrix eye(3, 3);
  for (int i = 0; i < 3; ++i) eye.at(i, i) = 1.0;
  const auto l_eye = cholesky(eye);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(l_eye.at(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-14));

  Matrix m(2, 2);
  m.at(0, 0) = 4;
  m.at(0, 1) = m.at(1, 0) = 2;
  m.at(1, 1) = 3;
  const auto l = cholesky(m);
  CHECK(l.at(0, 0) == doctest::Approx(2.0));
  CHECK(l.at(1, 0) == doctest::Approx(1.0));
  CHECK(l.at(1, 1) == doctest::Approx(std::sqrt(2.0)));
  CHECK(l.at(0, 1) == 0.0);

  Matrix singular(2, 2, 1.0);  // correlation exactly 1
  CHECK_THROWS_AS(cholesky(singular), ComputeError);

  Matrix asym(2, 2);
  asym.at(0, 1) = 0.5;
  asym.at(1, 0) = 0.2;
  asym.at(0, 0) = asym.at(1, 1) = 1.0;
  CHECK_THROWS_AS(cholesky(asym), std::invalid_argument);
}

TEST_CASE("cholesky round trip over random SPD matrices") {
  RngStream rng(2024, 1);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t dim = 2 + rng.below(49);
    Matrix a(dim, dim);
    for (double& v : a.data()) v = rng.gaussian();
    Matrix spd(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) {
        double s = 0;
        for (std::size_t k = 0; k < dim; ++k) s += a.at(i, k) * a.at(j, k);
        spd.at(i, j) = s + (i == j ? 0.5 : 0.0);  // keep it well conditioned
      }
    const auto l = cholesky(spd);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) {
        double rec = 0;
        for (std::size_t k = 0; k <= std::min(i, j); ++k) rec += l.at(i, k) * l.at(j, k);
        num += (rec - spd.at(i, j)) * (rec - spd.at(i, j));
        den += spd.at(i, j) * spd.at(i, j);
      }
    CHECK(std::sqrt(num / den) <= 1e-10);
  }
}

TEST_CASE("extreme_eigenvalues agrees with a Jacobi oracle") {
  RngStream rng(7, 7);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t dim = 2 + rng.below(8);
    Matrix a(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = i; j < dim; ++j) a.at(i, j) = a.at(j, i) = rng.gaussian();
    const auto [lmin, lmax] = extreme_eigenvalues(a);
    const auto eig = oracle::jacobi_eigenvalues(a.data(), dim);
    CHECK(lmin == doctest::Approx(eig.front()).epsilon(1e-7));
    CHECK(lmax == doctest::Approx(eig.back()).epsilon(1e-7));
  }
}

TEST_CASE("median: order statistics") {
  CHECK(median({5.0}) == 5.0);
  CHECK(median({1.0, 3.0, 2.0}) == 2.0);
  CHECK(median({1.0, 2.0, 3.0, 10.0}) == 2.5);
  CHECK_THROWS_AS(median({}), std::invalid_argument);
}

TEST_CASE("RngStream: replay, stream independence, bounds") {
  RngStream a(42, 5), b(42, 5);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());

  // same seed, different stream ids: disjoint draws in practice
  RngStream s0(42, 0), s1(42, 1);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) seen.insert(s0.next_u64());
  int collisions = 0;
  for (int i = 0; i < 1000; ++i) collisions += seen.count(s1.next_u64());
  CHECK(collisions == 0);

  RngStream c(1, 2);
  for (int i = 0; i < 1000; ++i) {
    CHECK(c.below(17) < 17);
    const double u = c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double uo = c.uniform_open();
    CHECK(uo > 0.0);
    CHECK(uo < 1.0);
  }

  // split is pure: identical children regardless of parent consumption
  RngStream parent(9, 9);
  RngStream child_before = parent.split(3);
  parent.next_u64();
  RngStream child_after = parent.split(3);
  for (int i = 0; i < 100; ++i)
    CHECK(child_before.next_u64() == child_after.next_u64());
}

TEST_CASE("RngStream: equidistribution smoke test across derived streams") {
  // pool 64 streams x 2000 draws into 16 bins; the chi-squared statistic
  // should be unexceptional (df = 15, far below 60), and each stream's
  // mean should sit near 1/2
  std::vector<std::size_t> bins(16, 0);
  for (std::uint64_t s = 0; s < 64; ++s) {
    RngStream rng(777, s);
    double sum = 0;
    for (int i = 0; i < 2000; ++i) {
      const double u = rng.uniform();
      sum += u;
      bins[static_cast<std::size_t>(u * 16)]++;
    }
    CHECK(std::fabs(sum / 2000 - 0.5) < 0.03);  // ~4.6 sigma
  }
  const double expected = 64.0 * 2000 / 16.0;
  CHECK(oracle::chi_squared_stat(bins, expected) < 60.0);

  // gaussian moments
  RngStream g(3, 1);
  std::vector<double> z(100000);
  for (double& v : z) v = g.gaussian();
  CHECK(oracle::mean(z) == doctest::Approx(0.0).epsilon(0.02));
  CHECK(oracle::variance(z) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("gamma_p / chi_squared_cdf against quadrature") {
  auto chi2_density = [](double k) {
    return [k](double x) {
      return std::exp((0.5 * k - 1.0) * std::log(x) - 0.5 * x -
                      std::lgamma(0.5 * k) - 0.5 * k * std::log(2.0));
    };
  };
  for (double k : {4.0, 19.0}) {
    for (double x : {0.5, 2.0, 10.0, 30.0}) {
      const double quad = oracle::adaptive_simpson(chi2_density(k), 1e-12, x, 1e-12);
      CHECK(chi_squared_cdf(x, k) == doctest::Approx(quad).epsilon(1e-8));
    }
  }
  // k = 1 has an integrable singularity at 0 that defeats Simpson; use the
  // closed form P(chi2_1 <= x) = 2 Phi(sqrt(x)) - 1 instead
  for (double x : {0.5, 2.0, 10.0, 30.0})
    CHECK(chi_squared_cdf(x, 1.0) ==
          doctest::Approx(2.0 * normal_cdf(std::sqrt(x)) - 1.0).epsilon(1e-10));
}
