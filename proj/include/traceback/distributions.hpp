#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include "traceback/random.hpp"

namespace traceback {

inline constexpr double kEulerMascheroni = 0.5772156649015328606;

// Location/scale pair of the Gumbel (extreme value, type I) law,
// F(x) = exp(-exp(-(x - mu)/beta)).
struct GumbelParams {
  double mu = 0.0;
  double beta = 1.0;
};

namespace detail {

inline void require_valid(const GumbelParams& params) {
  if (!(params.beta > 0.0) || !std::isfinite(params.beta) ||
      !std::isfinite(params.mu)) {
    throw std::domain_error("GumbelParams: beta must be finite and > 0, mu finite");
  }
}

}  // namespace detail

inline double gumbel_cdf(double x, const GumbelParams& params) {
  detail::require_valid(params);
  if (!std::isfinite(x)) throw std::domain_error("gumbel_cdf: x must be finite");
  return std::exp(-std::exp(-(x - params.mu) / params.beta));
}

inline double gumbel_pdf(double x, const GumbelParams& params) {
  detail::require_valid(params);
  if (!std::isfinite(x)) throw std::domain_error("gumbel_pdf: x must be finite");
  const double z = (x - params.mu) / params.beta;
  return std::exp(-z - std::exp(-z)) / params.beta;
}

inline double gumbel_quantile(double q, const GumbelParams& params) {
  detail::require_valid(params);
  if (!(q > 0.0 && q < 1.0)) {
    throw std::domain_error("gumbel_quantile: q must lie in (0,1)");
  }
  return params.mu - params.beta * std::log(-std::log(q));
}

inline double gumbel_mean(const GumbelParams& params) {
  detail::require_valid(params);
  return params.mu + params.beta * kEulerMascheroni;
}

inline double gumbel_variance(const GumbelParams& params) {
  detail::require_valid(params);
  const double pi = std::numbers::pi;
  return params.beta * params.beta * pi * pi / 6.0;
}

// Inverse transform: mu - beta*log(-log(U)). Exact and branch-free;
// uniform_open keeps U away from both endpoints.
template <class Rng>
inline double sample_gumbel(const GumbelParams& params, Rng& rng) {
  detail::require_valid(params);
  return params.mu - params.beta * std::log(-std::log(uniform_open(rng)));
}

template <class Rng>
inline double sample_exponential(double rate, Rng& rng) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::domain_error("sample_exponential: rate must be finite and > 0");
  }
  return -std::log(uniform_open(rng)) / rate;
}

// Trials until first success, support {1, 2, ...}.
template <class Rng>
inline std::int64_t sample_geometric(double success_prob, Rng& rng) {
  if (!(success_prob > 0.0 && success_prob <= 1.0)) {
    throw std::domain_error("sample_geometric: success_prob must lie in (0,1]");
  }
  if (success_prob == 1.0) return 1;
  const double u = uniform_open(rng);
  return 1 + static_cast<std::int64_t>(std::log(u) / std::log1p(-success_prob));
}

namespace detail {

template <class Rng>
inline std::int64_t poisson_inversion(double mean, Rng& rng) {
  const double limit = std::exp(-mean);
  std::int64_t k = 0;
  double product = 1.0;
  do {
    product *= uniform_open(rng);
    ++k;
  } while (product > limit);
  return k - 1;
}

// Hoermann's transformed rejection with squeeze (PTRS). O(1) draws for any
// mean; used above the inversion threshold where the product loop gets slow.
template <class Rng>
inline std::int64_t poisson_ptrs(double mean, Rng& rng) {
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    const double u = uniform_open(rng) - 0.5;
    const double v = uniform_open(rng);
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_mean - mean - std::lgamma(k + 1.0)) {
      return static_cast<std::int64_t>(k);
    }
  }
}

}  // namespace detail

template <class Rng>
inline std::int64_t sample_poisson(double mean, Rng& rng) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::domain_error("sample_poisson: mean must be finite and >= 0");
  }
  if (mean == 0.0) return 0;
  if (mean < 30.0) return detail::poisson_inversion(mean, rng);
  return detail::poisson_ptrs(mean, rng);
}

}  // namespace traceback
