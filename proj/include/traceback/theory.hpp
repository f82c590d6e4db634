#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "traceback/attack_model.hpp"
#include "traceback/distributions.hpp"

namespace traceback {

// Limit behaviour of the completion statistic for a path of length n:
// (X - center)/scale converges to normalized_law, equivalently X itself is
// approximately raw_law. main_term is the raw-law mean; error_scale is the
// magnitude of the finite-n correction, n*lnln(n)/ln(n).
struct TheoryPrediction {
  double main_term = 0.0;
  double error_scale = 0.0;
  double center = 0.0;
  double scale = 0.0;
  GumbelParams normalized_law;
  GumbelParams raw_law;
};

namespace detail {

inline void require_asymptotic_range(std::int64_t n, double lambda) {
  if (n < 3) {
    throw std::domain_error("asymptotic expansion needs n >= 3 (lnln n > 0)");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::domain_error("lambda must be finite and > 0");
  }
}

}  // namespace detail

// Exact distribution function of the continuous completion time at finite n:
// the product over real coupon types of (1 - exp(-p_i t)), evaluated in log
// space so that thousands of near-one factors do not lose precision.
inline double exact_continuous_cdf(double t, const CouponDistribution& dist) {
  if (std::isnan(t)) throw std::domain_error("exact_continuous_cdf: t is NaN");
  if (!(t > 0.0)) return 0.0;
  const std::int64_t n = dist.path_length();
  const double* probs = dist.probabilities.data();
  double log_cdf = 0.0;
  for (std::int64_t i = 1; i <= n; ++i) {
    log_cdf += std::log1p(-std::exp(-probs[i] * t));
  }
  return std::exp(log_cdf);
}

// main term (e^l/l) * n * (ln n - lnln n + gamma - ln l) and the error scale
// n * lnln n / ln n of the expected completion time.
inline std::pair<double, double> expected_time_asymptotic(std::int64_t n, double lambda) {
  detail::require_asymptotic_range(n, lambda);
  const double log_n = std::log(static_cast<double>(n));
  const double loglog_n = std::log(log_n);
  const double coeff = cost_coefficient(lambda);
  const double main_term = coeff * static_cast<double>(n) *
                           (log_n - loglog_n + kEulerMascheroni - std::log(lambda));
  const double error_scale = static_cast<double>(n) * loglog_n / log_n;
  return {main_term, error_scale};
}

inline TheoryPrediction limit_law(std::int64_t n, double lambda) {
  detail::require_asymptotic_range(n, lambda);
  const double log_n = std::log(static_cast<double>(n));
  const double loglog_n = std::log(log_n);
  const double coeff = cost_coefficient(lambda);

  TheoryPrediction prediction;
  prediction.center = coeff * static_cast<double>(n) * (log_n - loglog_n);
  prediction.scale = static_cast<double>(n);
  prediction.normalized_law = {0.0 - coeff * std::log(lambda), coeff};
  prediction.raw_law = {prediction.center + prediction.scale * prediction.normalized_law.mu,
                        prediction.scale * prediction.normalized_law.beta};
  auto [main_term, error_scale] = expected_time_asymptotic(n, lambda);
  prediction.main_term = main_term;
  prediction.error_scale = error_scale;
  return prediction;
}

inline double cdf_band_halfwidth(std::int64_t n, double constant = 0.25) {
  if (n < 3) throw std::domain_error("cdf_band_halfwidth: n >= 3 required");
  const double log_n = std::log(static_cast<double>(n));
  return constant * std::log(log_n) / log_n;
}

// Raw-scale confidence band around the limiting CDF for lambda = 1:
// F((t - e n ln n + e n lnln n)/n) +/- 0.25 lnln n/ln n with
// F(u) = exp(-e^(-u/e)), clamped to [0,1].
inline std::pair<double, double> cdf_band(double t, std::int64_t n) {
  if (n < 3) throw std::domain_error("cdf_band: n >= 3 required");
  const double e = std::numbers::e;
  const double log_n = std::log(static_cast<double>(n));
  const double loglog_n = std::log(log_n);
  const double normalized =
      (t - e * static_cast<double>(n) * (log_n - loglog_n)) / static_cast<double>(n);
  const double f = std::exp(-std::exp(-normalized / e));
  const double half = cdf_band_halfwidth(n);
  return {std::clamp(f - half, 0.0, 1.0), std::clamp(f + half, 0.0, 1.0)};
}

// Exact expectation of the maximum of independent exponentials with rates
// p_1..p_n by inclusion-exclusion over nonempty subsets. Gray-code order
// updates the subset rate sum in O(1) per term; extended precision tames the
// alternating cancellation. Feasible up to n = 25.
inline double exact_expected_time(const CouponDistribution& dist) {
  const std::int64_t n = dist.path_length();
  if (n > 25) {
    throw std::domain_error("exact_expected_time: refusing n > 25 (2^n terms)");
  }
  for (std::int64_t i = 1; i <= n; ++i) {
    if (!(dist.probabilities[static_cast<std::size_t>(i)] > 0.0)) {
      throw std::domain_error("exact_expected_time: every real coupon probability must be > 0");
    }
  }
  const double* probs = dist.probabilities.data();
  const std::uint64_t subsets = std::uint64_t{1} << n;
  long double total = 0.0L;
  long double rate_sum = 0.0L;
  int subset_size = 0;
  for (std::uint64_t k = 1; k < subsets; ++k) {
    const int bit = std::countr_zero(k);
    const std::uint64_t gray = k ^ (k >> 1);
    const long double rate = probs[bit + 1];
    if (gray & (std::uint64_t{1} << bit)) {
      rate_sum += rate;
      ++subset_size;
    } else {
      rate_sum -= rate;
      --subset_size;
    }
    total += (subset_size & 1) ? 1.0L / rate_sum : -1.0L / rate_sum;
  }
  return static_cast<double>(total);
}

namespace detail {

template <class Fn>
inline double adaptive_simpson(Fn&& f, double a, double b, double fa, double fm,
                               double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Numeric-integration route to the expected completion time,
// E(T) = int_0^inf (1 - F_T(t)) dt with the exact product CDF. Works at any
// n, unlike the inclusion-exclusion enumeration.
inline double expected_time_quadrature(const CouponDistribution& dist) {
  const std::int64_t n = dist.path_length();
  auto survival = [&dist](double t) {
    if (!(t > 0.0)) return 1.0;
    const double* probs = dist.probabilities.data();
    double log_cdf = 0.0;
    for (std::int64_t i = 1; i <= dist.path_length(); ++i) {
      log_cdf += std::log1p(-std::exp(-probs[i] * t));
    }
    return -std::expm1(log_cdf);
  };

  // Upper end: expand until the survival mass is negligible.
  double scale_guess = static_cast<double>(n);
  if (n >= 3) scale_guess = expected_time_asymptotic(n, dist.params.lambda).first;
  double hi = std::max(scale_guess, 1.0);
  while (survival(hi) > 1e-14) hi *= 1.5;

  const double fa = survival(0.0);
  const double fb = survival(hi);
  const double fm = survival(0.5 * hi);
  const double whole = hi / 6.0 * (fa + 4.0 * fm + fb);
  const double tol = 1e-10 * std::max(hi, 1.0);
  return detail::adaptive_simpson(survival, 0.0, hi, fa, fm, fb, whole, tol, 48);
}

// Sandwich on the discrete CDF in terms of the continuous one:
// F_T(d - d^(3/4)) - (d - d^(3/4))^(-1/3) <= F_D(d) <= F_T(d + d^(3/4)) + (d + d^(3/4))^(-1/3),
// both sides clamped to [0,1].
inline std::pair<double, double> coupling_bounds(double d, const CouponDistribution& dist) {
  const double shift = std::pow(d, 0.75);
  const double low_t = d - shift;
  if (!(low_t > 0.0)) {
    throw std::domain_error("coupling_bounds: need d - d^(3/4) > 0");
  }
  const double high_t = d + shift;
  const double lower = exact_continuous_cdf(low_t, dist) - std::pow(low_t, -1.0 / 3.0);
  const double upper = exact_continuous_cdf(high_t, dist) + std::pow(high_t, -1.0 / 3.0);
  return {std::clamp(lower, 0.0, 1.0), std::clamp(upper, 0.0, 1.0)};
}

}  // namespace traceback
