#include <gtest/gtest.h>

#include <cmath>

#include "mckle/errors.hpp"
#include "mckle/quadrature.hpp"
#include "mckle/rng.hpp"
#include "mckle/special.hpp"

using namespace mckle;
using namespace mckle::special;

TEST(Normal, CdfAndQuantileKnownValues) {
  EXPECT_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
  EXPECT_NEAR(normal_quantile(0.025), -1.959963984540054, 1e-12);
  EXPECT_NEAR(normal_quantile(0.995), 2.5758293035489004, 1e-12);
  EXPECT_NEAR(normal_quantile(1e-10), -6.361340902404056, 1e-9);
  EXPECT_THROW(normal_quantile(0.0), DomainError);
  EXPECT_THROW(normal_quantile(1.0), DomainError);
}

// Bisection on the cdf is the oracle for the rational approximation.
TEST(Normal, QuantileInvertsCdf) {
  for (double p = 0.001; p < 1.0; p += 0.0123) {
    double lo = -10, hi = 10;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    EXPECT_NEAR(normal_quantile(p), 0.5 * (lo + hi), 1e-9) << p;
  }
}

TEST(Normal, LogCdfTails) {
  for (double z : {-20.0, -5.0, -1.0, 0.0, 2.0, 6.0}) {
    EXPECT_NEAR(log_normal_cdf(z), std::log(normal_cdf(z)), 1e-12 * (1.0 + std::abs(std::log(normal_cdf(z)))));
  }
  // Deep lower tail against log(φ(z)/|z|) with the first Mills correction.
  for (double z : {-40.0, -100.0, -1000.0}) {
    const double approx = log_normal_pdf(z) - std::log(-z) + std::log1p(-1.0 / (z * z));
    EXPECT_NEAR(log_normal_cdf(z), approx, 1e-6 * std::abs(approx));
  }
  // Upper tail: log Φ(z) ≈ -Φ(-z).
  EXPECT_NEAR(log_normal_cdf(10.0), -normal_sf(10.0), 1e-30);
  EXPECT_GT(std::exp(log_normal_sf(40.0)), -1.0);
  EXPECT_TRUE(std::isfinite(log_normal_sf(40.0)));
  EXPECT_NEAR(log_normal_sf(40.0), log_normal_pdf(40.0) - std::log(40.0), 1e-3);
}

TEST(Normal, InverseMills) {
  for (double z : {-30.0, -3.0, 0.0, 2.0}) {
    const double fd = (log_normal_cdf(z + 1e-5) - log_normal_cdf(z - 1e-5)) / 2e-5;
    EXPECT_NEAR(inverse_mills(z), fd, 1e-6 * (1.0 + std::abs(fd)));
  }
}

TEST(Chi2, QuantilesAndTails) {
  EXPECT_NEAR(chi2_quantile_df1(0.95), 3.841458820694124, 1e-9);
  EXPECT_NEAR(chi2_quantile_df1(0.5), 0.454936423119572, 1e-9);
  EXPECT_LT(chi2_quantile_df1(1e-12), 1e-20);
  EXPECT_NEAR(chi2_df1_cdf(3.841458820694124), 0.95, 1e-12);
  EXPECT_NEAR(chi2_df1_sf(3.841458820694124), 0.05, 1e-12);
  EXPECT_EQ(chi2_df1_sf(0.0), 1.0);
  EXPECT_THROW(chi2_quantile_df1(1.0), DomainError);
}

TEST(Dilog, KnownValues) {
  const double pi2 = kPi * kPi;
  EXPECT_NEAR(dilog(0.0), 0.0, 1e-16);
  EXPECT_NEAR(dilog(1.0), pi2 / 6.0, 1e-15);
  EXPECT_NEAR(dilog(0.5), pi2 / 12.0 - 0.5 * std::log(2.0) * std::log(2.0), 1e-15);
  // Li₂(x) = -∫_0^x log(1-t)/t dt.
  for (double x : {0.1, 0.3, 0.7, 0.9, 0.99}) {
    const double q = quad::adaptive_simpson(
        [](double t) { return t == 0.0 ? 1.0 : -std::log1p(-t) / t; }, 0.0, x);
    EXPECT_NEAR(dilog(x), q, 1e-11) << x;
  }
}

TEST(Quadrature, SmoothIntegrals) {
  EXPECT_NEAR(quad::adaptive_simpson([](double x) { return std::sin(x); }, 0.0, kPi), 2.0, 1e-12);
  EXPECT_NEAR(quad::adaptive_simpson([](double x) { return std::exp(-x * x); }, -10.0, 10.0),
              std::sqrt(kPi), 1e-10);
  EXPECT_EQ(quad::adaptive_simpson([](double x) { return x; }, 1.0, 1.0), 0.0);
  // Reversed limits flip the sign.
  EXPECT_NEAR(quad::adaptive_simpson([](double x) { return x * x; }, 1.0, 0.0), -1.0 / 3.0, 1e-14);
  const double cuts[] = {-5.0, 0.0, 5.0};
  EXPECT_NEAR(quad::integrate_piecewise([](double x) { return std::abs(x); }, cuts), 25.0, 1e-12);
}

TEST(Rng, DeterministicStreams) {
  Rng a(42), b(42), c(42, 1);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  EXPECT_NE(Rng(42).next_u64(), c.next_u64());
  EXPECT_NE(stream_id(1, 2), stream_id(2, 1));
  // Golden values of the documented algorithm.
  Rng g(0);
  const std::uint64_t key = Rng::mix(0 ^ Rng::mix(0x9E3779B97F4A7C15ULL));
  EXPECT_EQ(g.key(), key);
  EXPECT_EQ(g.next_u64(), Rng::mix(key + 0x9E3779B97F4A7C15ULL));
  EXPECT_EQ(Rng::mix(0), 0u);
}

TEST(Rng, UniformMoments) {
  Rng r(123);
  double s = 0.0, s2 = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    s += u;
    s2 += u * u;
  }
  EXPECT_NEAR(s / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(s2 / n, 1.0 / 3.0, 2e-3);
}
