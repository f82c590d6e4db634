#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "traceback/alias_table.hpp"
#include "traceback/attack_model.hpp"
#include "traceback/distributions.hpp"
#include "traceback/random.hpp"

namespace traceback {

enum class Model { kDiscreteNaive, kContinuous, kDiscreteCoupled, kPacketLevel };

inline std::string_view model_name(Model model) {
  switch (model) {
    case Model::kDiscreteNaive: return "discrete-naive";
    case Model::kContinuous: return "continuous";
    case Model::kDiscreteCoupled: return "discrete-coupled";
    case Model::kPacketLevel: return "packet-level";
  }
  throw std::logic_error("model_name: unknown model");
}

inline Model model_from_name(std::string_view name) {
  if (name == "discrete-naive") return Model::kDiscreteNaive;
  if (name == "continuous") return Model::kContinuous;
  if (name == "discrete-coupled") return Model::kDiscreteCoupled;
  if (name == "packet-level") return Model::kPacketLevel;
  throw std::invalid_argument("unknown model name: " + std::string(name));
}

// Per-trial outcomes of one simulation run: draw counts for discrete models,
// completion times for the continuous one.
struct TrialSample {
  Model model = Model::kDiscreteNaive;
  std::int64_t path_length = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::int64_t trial_count = 0;
  std::vector<double> values;
};

namespace detail {

// Runs trial_count independent trials, each on its own RNG stream keyed by
// (seed, trial index). Workers split the index range into contiguous blocks;
// every worker owns a copy of the functor, so scratch state inside it is
// private. Output is ordered by trial index and does not depend on the
// worker count.
template <class TrialFn>
inline std::vector<double> run_trials(std::int64_t trial_count, std::uint64_t seed,
                                      int workers, TrialFn trial_fn) {
  if (trial_count < 1) throw std::domain_error("run_trials: trial count must be >= 1");
  std::vector<double> values(static_cast<std::size_t>(trial_count));

  int worker_count = workers;
  if (worker_count <= 0) {
    worker_count = static_cast<int>(std::thread::hardware_concurrency());
    if (worker_count <= 0) worker_count = 1;
  }
  worker_count = static_cast<int>(
      std::min<std::int64_t>(worker_count, trial_count));

  auto run_block = [&values, seed](std::int64_t begin, std::int64_t end, TrialFn fn) {
    for (std::int64_t t = begin; t < end; ++t) {
      Xoshiro256pp rng = Xoshiro256pp::for_trial(seed, static_cast<std::uint64_t>(t));
      values[static_cast<std::size_t>(t)] = fn(rng);
    }
  };

  if (worker_count == 1) {
    run_block(0, trial_count, std::move(trial_fn));
    return values;
  }

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(worker_count));
  const std::int64_t chunk = (trial_count + worker_count - 1) / worker_count;
  for (int w = 0; w < worker_count; ++w) {
    const std::int64_t begin = w * chunk;
    const std::int64_t end = std::min<std::int64_t>(begin + chunk, trial_count);
    if (begin >= end) break;
    pool.emplace_back(run_block, begin, end, trial_fn);
  }
  for (auto& th : pool) th.join();
  return values;
}

}  // namespace detail

// Draws coupons one by one (dummy included) until every real type 1..n has
// been seen; the completing draw is counted. O(1) per draw via an alias
// table, so a trial costs O(D).
inline TrialSample simulate_discrete_naive(const CouponDistribution& dist,
                                           std::int64_t trial_count,
                                           std::uint64_t seed, int workers = 0) {
  const std::int64_t n = dist.path_length();
  const AliasTable table(dist.probabilities);

  struct Trial {
    const AliasTable* table;
    std::int64_t n;
    std::vector<std::int64_t> seen_at;  // trial stamp per type, reused scratch
    std::int64_t stamp = 0;

    double operator()(Xoshiro256pp& rng) {
      if (seen_at.empty()) seen_at.assign(static_cast<std::size_t>(n) + 1, -1);
      const std::int64_t trial_stamp = stamp++;
      std::int64_t missing = n;
      std::int64_t draws = 0;
      while (missing > 0) {
        const std::size_t type = table->sample(rng);
        ++draws;
        if (type != 0 && seen_at[type] != trial_stamp) {
          seen_at[type] = trial_stamp;
          --missing;
        }
      }
      return static_cast<double>(draws);
    }
  };

  TrialSample sample{Model::kDiscreteNaive, n, dist.params.lambda, seed, trial_count, {}};
  sample.values = detail::run_trials(trial_count, seed, workers, Trial{&table, n, {}, 0});
  return sample;
}

// Continuous completion time: T = max over real types of an Exp(p_i) first
// arrival. The dummy type does not gate completion and is excluded.
inline TrialSample simulate_continuous(const CouponDistribution& dist,
                                       std::int64_t trial_count,
                                       std::uint64_t seed, int workers = 0) {
  const std::int64_t n = dist.path_length();
  const double* probs = dist.probabilities.data();

  auto trial = [probs, n](Xoshiro256pp& rng) {
    double t_max = 0.0;
    for (std::int64_t i = 1; i <= n; ++i) {
      const double arrival = -std::log(uniform_open(rng)) / probs[i];
      if (arrival > t_max) t_max = arrival;
    }
    return t_max;
  };

  TrialSample sample{Model::kContinuous, n, dist.params.lambda, seed, trial_count, {}};
  sample.values = detail::run_trials(trial_count, seed, workers, trial);
  return sample;
}

// Exact O(n)-per-trial sampler of the draw count D, via the embedding of the
// discrete drawing process into a unit-rate Poisson arrival stream split by
// coupon type. Per trial: first arrivals A_i ~ Exp(p_i); completion at
// T = max over real types of A_i; every coupon seen by then contributes its
// first arrival plus Poisson(p_i*(T - A_i)) repeats. The repeat counts only
// enter through their sum, which is Poisson of the summed intensity.
inline TrialSample simulate_discrete_coupled(const CouponDistribution& dist,
                                             std::int64_t trial_count,
                                             std::uint64_t seed, int workers = 0) {
  const std::int64_t n = dist.path_length();
  const double* probs = dist.probabilities.data();
  const double dummy_prob = dist.dummy_probability();
  // sum of real-type rates, 1 - p_0
  long double real_rate = 0.0L;
  for (std::int64_t i = 1; i <= n; ++i) real_rate += probs[i];
  const double real_rate_total = static_cast<double>(real_rate);

  auto trial = [probs, n, dummy_prob, real_rate_total](Xoshiro256pp& rng) {
    double t_max = 0.0;
    double weighted_arrivals = 0.0;  // sum of p_i * A_i over real types
    for (std::int64_t i = 1; i <= n; ++i) {
      const double unit_exp = -std::log(uniform_open(rng));  // p_i * A_i
      weighted_arrivals += unit_exp;
      const double arrival = unit_exp / probs[i];
      if (arrival > t_max) t_max = arrival;
    }
    // All real types arrive by t_max; their repeat intensity telescopes.
    double repeat_mean = t_max * real_rate_total - weighted_arrivals;
    std::int64_t draws = n;
    if (dummy_prob > 0.0) {
      const double dummy_arrival = -std::log(uniform_open(rng)) / dummy_prob;
      if (dummy_arrival <= t_max) {
        ++draws;
        repeat_mean += dummy_prob * (t_max - dummy_arrival);
      }
    }
    if (repeat_mean > 0.0) draws += sample_poisson(repeat_mean, rng);
    return static_cast<double>(draws);
  };

  TrialSample sample{Model::kDiscreteCoupled, n, dist.params.lambda, seed, trial_count, {}};
  sample.values = detail::run_trials(trial_count, seed, workers, trial);
  return sample;
}

}  // namespace traceback
