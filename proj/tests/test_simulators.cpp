#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "traceback/alias_table.hpp"
#include "traceback/simulators.hpp"
#include "traceback/stats.hpp"
#include "traceback/theory.hpp"

using namespace traceback;

TEST(AliasTable, ReproducesWeights) {
  const std::vector<double> weights{0.5, 0.3, 0.2};
  const AliasTable table(weights);
  Xoshiro256pp rng(1);
  std::vector<std::int64_t> observed(weights.size(), 0);
  constexpr int kDraws = 1000000;
  for (int i = 0; i < kDraws; ++i) ++observed[table.sample(rng)];
  std::vector<double> expected;
  for (double w : weights) expected.push_back(w * kDraws);
  EXPECT_LT(oracles::chi_square(observed, expected), 13.82);  // chi2(2) at 0.1%
}

TEST(AliasTable, HandlesSkewedVector) {
  std::vector<double> weights(64);
  Xoshiro256pp seed_rng(2);
  for (auto& w : weights) w = uniform_open(seed_rng) * uniform_open(seed_rng);
  const AliasTable table(weights);
  double total = 0.0;
  for (double w : weights) total += w;
  Xoshiro256pp rng(3);
  std::vector<std::int64_t> observed(weights.size(), 0);
  constexpr int kDraws = 2000000;
  for (int i = 0; i < kDraws; ++i) ++observed[table.sample(rng)];
  std::vector<double> expected;
  for (double w : weights) expected.push_back(w / total * kDraws);
  EXPECT_LT(oracles::chi_square(observed, expected), 120.0);  // chi2(63) at ~0.1%
}

TEST(AliasTable, RejectsDegenerateInput) {
  EXPECT_THROW(AliasTable(std::vector<double>{}), std::domain_error);
  EXPECT_THROW(AliasTable(std::vector<double>{0.0, 0.0}), std::domain_error);
  EXPECT_THROW(AliasTable(std::vector<double>{0.5, -0.1}), std::domain_error);
}

TEST(DiscreteNaive, SingleCouponAlwaysOneDraw) {
  const auto sample = simulate_discrete_naive(build_distribution({1, 1.0}), 500, 4);
  for (double v : sample.values) ASSERT_EQ(v, 1.0);
}

TEST(DiscreteNaive, TwoCouponMeanMatchesInclusionExclusion) {
  const CouponDistribution dist = build_distribution({2, 1.0});
  const auto sample = simulate_discrete_naive(dist, 100000, 5);
  const SampleSummary s = summarize(sample);
  const double se = std::sqrt(s.variance / static_cast<double>(s.count));
  EXPECT_NEAR(s.mean, 14.0 / 3.0, 3.0 * se);
}

TEST(Continuous, SingleTypeIsUnitExponential) {
  const auto sample = simulate_continuous(build_distribution({1, 1.0}), 100000, 6);
  const SampleSummary s = summarize(sample);
  const double se = std::sqrt(s.variance / static_cast<double>(s.count));
  EXPECT_NEAR(s.mean, 1.0, 3.0 * se);
  for (double v : sample.values) ASSERT_GT(v, 0.0);
}

TEST(Continuous, TwoTypeMeanMatchesInclusionExclusion) {
  const CouponDistribution dist = build_distribution({2, 1.0});
  const std::vector<double> rates{dist.probabilities[1], dist.probabilities[2]};
  const double exact = oracles::expected_max_exponential(rates);
  EXPECT_NEAR(exact, 14.0 / 3.0, 1e-12);
  const auto sample = simulate_continuous(dist, 100000, 7);
  const SampleSummary s = summarize(sample);
  EXPECT_NEAR(s.mean, exact, 3.0 * std::sqrt(s.variance / static_cast<double>(s.count)));
}

TEST(DiscreteCoupled, SingleCouponAlwaysOneDraw) {
  const auto sample = simulate_discrete_coupled(build_distribution({1, 1.0}), 2000, 8);
  for (double v : sample.values) ASSERT_EQ(v, 1.0);
}

TEST(DiscreteCoupled, MatchesNaiveDistribution) {
  const CouponDistribution dist = build_distribution({3, 1.0});
  constexpr std::int64_t kTrials = 100000;
  const SampleSummary naive = summarize(simulate_discrete_naive(dist, kTrials, 9));
  const SampleSummary coupled = summarize(simulate_discrete_coupled(dist, kTrials, 10));
  EXPECT_LT(ks_two_sample(naive, coupled), ks_two_sample_threshold(kTrials, kTrials, 0.01));
}

TEST(DiscreteCoupled, MatchesNaiveAcrossParameterGrid) {
  constexpr std::int64_t kTrials = 100000;
  const double threshold = ks_two_sample_threshold(kTrials, kTrials, 0.01);
  std::uint64_t seed = 400;
  for (std::int64_t n : {2LL, 3LL, 5LL, 8LL}) {
    for (double lambda : {0.5, 1.0}) {
      const CouponDistribution dist = build_distribution({n, lambda});
      const SampleSummary naive =
          summarize(simulate_discrete_naive(dist, kTrials, seed++));
      const SampleSummary coupled =
          summarize(simulate_discrete_coupled(dist, kTrials, seed++));
      EXPECT_LT(ks_two_sample(naive, coupled), threshold)
          << "n=" << n << " lambda=" << lambda;
    }
  }
}

TEST(DiscreteEngines, DrawCountsAreIntegersAtLeastN) {
  for (std::int64_t n : {2LL, 7LL}) {
    const CouponDistribution dist = build_distribution({n, 0.5});
    for (const auto& sample : {simulate_discrete_naive(dist, 2000, 11),
                               simulate_discrete_coupled(dist, 2000, 12)}) {
      for (double v : sample.values) {
        ASSERT_GE(v, static_cast<double>(n));
        ASSERT_EQ(v, std::floor(v));
      }
    }
  }
}

TEST(Engines, DeterministicAcrossWorkerCounts) {
  const CouponDistribution dist = build_distribution({50, 1.0});
  const auto one = simulate_discrete_coupled(dist, 4000, 99, 1);
  const auto three = simulate_discrete_coupled(dist, 4000, 99, 3);
  const auto rerun = simulate_discrete_coupled(dist, 4000, 99, 3);
  ASSERT_EQ(one.values.size(), 4000u);
  EXPECT_EQ(one.path_length, 50);
  EXPECT_EQ(one.seed, 99u);
  EXPECT_EQ(one.model, Model::kDiscreteCoupled);
  EXPECT_EQ(one.values, three.values);
  EXPECT_EQ(three.values, rerun.values);
  const auto other_seed = simulate_discrete_coupled(dist, 4000, 100, 1);
  EXPECT_NE(one.values, other_seed.values);
}

TEST(Engines, MeanEqualityAtModerateN) {
  const CouponDistribution dist = build_distribution({5, 1.0});
  const double exact = exact_expected_time(dist);
  constexpr std::int64_t kTrials = 200000;
  for (const auto& sample : {simulate_discrete_coupled(dist, kTrials, 13),
                             simulate_continuous(dist, kTrials, 14)}) {
    const SampleSummary s = summarize(sample);
    const double se = std::sqrt(s.variance / static_cast<double>(kTrials));
    EXPECT_NEAR(s.mean, exact, 3.0 * se) << model_name(sample.model);
  }
}

// Large-path spot check of the naive engine against the reference discrete
// mean 207945; slow path, kept at a reduced trial count.
TEST(DiscreteNaive, LargePathMean) {
  const CouponDistribution dist = build_distribution({10000, 1.0});
  constexpr std::int64_t kTrials = 1000;
  const SampleSummary s = summarize(simulate_discrete_naive(dist, kTrials, 15));
  const double se = std::sqrt(s.variance / static_cast<double>(kTrials));
  EXPECT_NEAR(s.mean, 207945.0, 3.0 * se);
}

TEST(Engines, RejectsBadTrialCount) {
  const CouponDistribution dist = build_distribution({2, 1.0});
  EXPECT_THROW(simulate_continuous(dist, 0, 1), std::domain_error);
}
