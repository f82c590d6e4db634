#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace traceback {

// Attack-path geometry: n routers on the single path between attacker and
// victim, each marking a forwarded packet with probability p = lambda/n.
struct PathParameters {
  std::int64_t path_length = 1;  // n
  double lambda = 1.0;

  double marking_probability() const { return lambda / static_cast<double>(path_length); }

  void validate() const {
    if (path_length < 1) {
      throw std::domain_error("PathParameters: path length must be >= 1");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw std::domain_error("PathParameters: lambda must be finite and > 0");
    }
    if (lambda > static_cast<double>(path_length)) {
      throw std::domain_error("PathParameters: lambda > n makes the marking probability exceed 1");
    }
  }
};

// Probability vector over coupon types 0..n. Index i >= 1 is the edge at
// distance i from the victim, drawn with probability p*(1-p)^(i-1); index 0
// is the dummy coupon (unmarked packet) with probability (1-p)^n.
struct CouponDistribution {
  PathParameters params;
  std::vector<double> probabilities;  // size n+1, index 0 = dummy

  std::int64_t path_length() const { return params.path_length; }
  double dummy_probability() const { return probabilities[0]; }
};

// Running product in extended precision: one rounding per stored entry, so
// the vector sums to 1 within ~1e-15 even at n = 10^6.
inline CouponDistribution build_distribution(const PathParameters& params) {
  params.validate();
  const std::int64_t n = params.path_length;
  const long double p = static_cast<long double>(params.lambda) / static_cast<long double>(n);

  CouponDistribution dist;
  dist.params = params;
  dist.probabilities.resize(static_cast<std::size_t>(n) + 1);
  long double survivor = 1.0L;  // (1-p)^(i-1)
  for (std::int64_t i = 1; i <= n; ++i) {
    dist.probabilities[static_cast<std::size_t>(i)] = static_cast<double>(p * survivor);
    survivor *= (1.0L - p);
  }
  dist.probabilities[0] = static_cast<double>(survivor);  // (1-p)^n
  return dist;
}

// Leading coefficient of the reconstruction time, e^lambda / lambda.
inline double cost_coefficient(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::domain_error("cost_coefficient: lambda must be finite and > 0");
  }
  return std::exp(lambda) / lambda;
}

// argmin of e^lambda/lambda over lambda > 0; the derivative vanishes at 1.
inline double optimal_lambda() noexcept { return 1.0; }

}  // namespace traceback
