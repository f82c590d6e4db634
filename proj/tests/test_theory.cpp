#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "traceback/theory.hpp"

using namespace traceback;

namespace {
constexpr double kE = std::numbers::e;
}

TEST(ExactContinuousCdf, BoundaryAndSmallCases) {
  const CouponDistribution dist1 = build_distribution({1, 1.0});
  EXPECT_EQ(exact_continuous_cdf(0.0, dist1), 0.0);
  EXPECT_EQ(exact_continuous_cdf(-5.0, dist1), 0.0);
  EXPECT_NEAR(exact_continuous_cdf(std::log(2.0), dist1), 0.5, 1e-14);
  EXPECT_THROW(exact_continuous_cdf(std::nan(""), dist1), std::domain_error);
}

TEST(ExactContinuousCdf, MonotoneAndReachesOne) {
  const CouponDistribution dist = build_distribution({100, 1.0});
  const double main_term = expected_time_asymptotic(100, 1.0).first;
  double prev = 0.0;
  for (int k = 1; k <= 60; ++k) {
    const double f = exact_continuous_cdf(main_term * k / 20.0, dist);
    ASSERT_GE(f, prev);
    prev = f;
  }
  EXPECT_GT(exact_continuous_cdf(10.0 * main_term, dist), 0.999);
}

TEST(ExactContinuousCdf, ReferenceScaleValueNearMedian) {
  const CouponDistribution dist = build_distribution({10000, 1.0});
  const double f = exact_continuous_cdf(207885.0, dist);
  EXPECT_GT(f, 0.4);
  EXPECT_LT(f, 0.6);
}

TEST(ExactExpectedTime, SmallCases) {
  EXPECT_NEAR(exact_expected_time(build_distribution({1, 1.0})), 1.0, 1e-14);
  EXPECT_NEAR(exact_expected_time(build_distribution({2, 1.0})), 14.0 / 3.0, 1e-12);
  EXPECT_NEAR(exact_expected_time(build_distribution({3, 1.0})), 9.0941295546558704, 1e-10);
}

TEST(ExactExpectedTime, MatchesDirectEnumerationOracle) {
  for (std::int64_t n : {5LL, 12LL}) {
    for (double lambda : {0.5, 1.0}) {
      const CouponDistribution dist = build_distribution({n, lambda});
      const std::vector<double> rates(dist.probabilities.begin() + 1, dist.probabilities.end());
      const double oracle = oracles::expected_max_exponential(rates);
      EXPECT_NEAR(exact_expected_time(dist) / oracle, 1.0, 1e-10)
          << "n=" << n << " lambda=" << lambda;
    }
  }
}

TEST(ExactExpectedTime, Refusals) {
  EXPECT_THROW(exact_expected_time(build_distribution({26, 1.0})), std::domain_error);
  // p = 1 zeroes out every probability beyond the first type.
  EXPECT_THROW(exact_expected_time(build_distribution({2, 2.0})), std::domain_error);
}

TEST(Quadrature, AgreesWithInclusionExclusion) {
  for (std::int64_t n : {2LL, 5LL, 10LL}) {
    const CouponDistribution dist = build_distribution({n, 1.0});
    EXPECT_NEAR(expected_time_quadrature(dist) / exact_expected_time(dist), 1.0, 1e-8)
        << "n=" << n;
  }
}

TEST(Quadrature, ReferenceScaleGapStaysInsideErrorScale) {
  const CouponDistribution dist = build_distribution({10000, 1.0});
  const auto [main_term, error_scale] = expected_time_asymptotic(10000, 1.0);
  const double exact_mean = expected_time_quadrature(dist);
  EXPECT_LT(std::fabs(exact_mean - main_term), error_scale);
  EXPECT_NEAR(exact_mean, 207953.0, 1.0);  // frozen from the quadrature oracle
}

TEST(Asymptotics, ReferenceScaleNumbers) {
  const auto [main_term, error_scale] = expected_time_asymptotic(10000, 1.0);
  EXPECT_NEAR(main_term, 205699.0, 1.0);
  EXPECT_NEAR(error_scale, 2410.7, 0.1);
  EXPECT_THROW(expected_time_asymptotic(2, 1.0), std::domain_error);
  EXPECT_THROW(expected_time_asymptotic(100, 0.0), std::domain_error);
}

TEST(LimitLaw, NormalizedAndRawForms) {
  const TheoryPrediction pred = limit_law(10000, 1.0);
  EXPECT_DOUBLE_EQ(pred.normalized_law.mu, 0.0);  // -e*ln(1)/1
  EXPECT_NEAR(pred.normalized_law.beta, kE, 1e-15);
  EXPECT_NEAR(pred.raw_law.mu, 190008.27, 0.01);
  EXPECT_NEAR(pred.raw_law.beta, 27182.82, 0.01);
  EXPECT_EQ(pred.scale, 10000.0);
}

TEST(LimitLaw, RawMeanEqualsMainTermOnGrid) {
  for (std::int64_t n : {100LL, 1000LL, 10000LL}) {
    for (double lambda : {0.5, 1.0, 2.0}) {
      const TheoryPrediction pred = limit_law(n, lambda);
      const double raw_mean = gumbel_mean(pred.raw_law);
      EXPECT_NEAR(raw_mean / pred.main_term, 1.0, 1e-9) << "n=" << n << " l=" << lambda;
    }
  }
}

TEST(CdfBand, HalfwidthAndCenter) {
  EXPECT_NEAR(cdf_band_halfwidth(10000), 0.0602672, 5e-7);
  const double center_t = kE * 1e4 * (std::log(1e4) - std::log(std::log(1e4)));
  const auto [lower, upper] = cdf_band(center_t, 10000);
  EXPECT_NEAR(upper - lower, 2.0 * cdf_band_halfwidth(10000), 1e-12);
  EXPECT_NEAR(0.5 * (lower + upper), std::exp(-1.0), 1e-9);
}

TEST(CdfBand, ClampsAtTheEdges) {
  const auto [lower, upper] = cdf_band(1e12, 10000);
  EXPECT_EQ(upper, 1.0);
  EXPECT_NEAR(lower, 1.0 - cdf_band_halfwidth(10000), 1e-9);
  const auto [lower0, upper0] = cdf_band(0.0, 10000);
  EXPECT_EQ(lower0, 0.0);
  EXPECT_NEAR(upper0, cdf_band_halfwidth(10000), 1e-9);
  EXPECT_THROW(cdf_band(0.0, 2), std::domain_error);
}

TEST(CouplingBounds, OrderedAndConvergent) {
  const CouponDistribution dist = build_distribution({10000, 1.0});
  for (double d : {5e4, 1e5, 2e5, 4e5}) {
    const auto [lower, upper] = coupling_bounds(d, dist);
    ASSERT_LE(lower, upper);
    ASSERT_GE(lower, 0.0);
    ASSERT_LE(upper, 1.0);
  }
  const auto [lower, upper] = coupling_bounds(1e12, dist);
  EXPECT_GT(lower, 0.999);
  EXPECT_EQ(upper, 1.0);
  EXPECT_THROW(coupling_bounds(1.0, dist), std::domain_error);
  EXPECT_THROW(coupling_bounds(0.5, dist), std::domain_error);
}
