#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "traceback/distributions.hpp"
#include "traceback/simulators.hpp"

namespace traceback {

// Moments plus a sorted copy of the values for ECDF queries.
struct SampleSummary {
  std::int64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double min = 0.0;
  double max = 0.0;
  std::vector<double> sorted;

  // Right-continuous empirical distribution function.
  double ecdf(double x) const {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
  }
};

inline SampleSummary summarize(std::span<const double> values) {
  if (values.size() < 2) {
    throw std::domain_error("summarize: need at least 2 values for the variance");
  }
  SampleSummary summary;
  summary.count = static_cast<std::int64_t>(values.size());
  summary.min = values[0];
  summary.max = values[0];
  // Welford's streaming mean/variance.
  double mean = 0.0;
  double m2 = 0.0;
  std::int64_t seen = 0;
  for (double v : values) {
    ++seen;
    const double delta = v - mean;
    mean += delta / static_cast<double>(seen);
    m2 += delta * (v - mean);
    summary.min = std::min(summary.min, v);
    summary.max = std::max(summary.max, v);
  }
  summary.mean = mean;
  summary.variance = m2 / static_cast<double>(seen - 1);
  summary.sorted.assign(values.begin(), values.end());
  std::sort(summary.sorted.begin(), summary.sorted.end());
  return summary;
}

inline SampleSummary summarize(const TrialSample& sample) {
  return summarize(std::span<const double>(sample.values));
}

// One-sample Kolmogorov distance sup_x |ECDF(x) - cdf(x)|, evaluated on both
// sides of every jump.
template <class Cdf>
inline double ks_distance(const SampleSummary& summary, Cdf&& cdf) {
  const auto& xs = summary.sorted;
  if (xs.empty()) throw std::domain_error("ks_distance: empty sample");
  const double m = static_cast<double>(xs.size());
  double dist = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    dist = std::max(dist, static_cast<double>(i + 1) / m - f);
    dist = std::max(dist, f - static_cast<double>(i) / m);
  }
  return dist;
}

inline double ks_two_sample(const SampleSummary& a, const SampleSummary& b) {
  const auto& xs = a.sorted;
  const auto& ys = b.sorted;
  if (xs.empty() || ys.empty()) throw std::domain_error("ks_two_sample: empty sample");
  const double m = static_cast<double>(xs.size());
  const double n = static_cast<double>(ys.size());
  std::size_t i = 0, j = 0;
  double dist = 0.0;
  while (i < xs.size() && j < ys.size()) {
    const double xa = xs[i];
    const double yb = ys[j];
    if (xa <= yb) while (i < xs.size() && xs[i] == xa) ++i;
    if (yb <= xa) while (j < ys.size() && ys[j] == yb) ++j;
    dist = std::max(dist, std::fabs(static_cast<double>(i) / m - static_cast<double>(j) / n));
  }
  return dist;
}

// Dvoretzky-Kiefer-Wolfowitz envelope: sup |ECDF - F| exceeds this with
// probability at most alpha.
inline double dkw_epsilon(std::int64_t sample_count, double alpha) {
  if (sample_count < 1 || !(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("dkw_epsilon: need sample_count >= 1 and alpha in (0,1)");
  }
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(sample_count)));
}

// Critical value of the two-sample Kolmogorov statistic at significance
// alpha, c(alpha) * sqrt((m+n)/(m*n)) with c(alpha) = sqrt(ln(2/alpha)/2).
inline double ks_two_sample_threshold(std::int64_t m, std::int64_t n, double alpha) {
  if (m < 1 || n < 1 || !(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("ks_two_sample_threshold: invalid arguments");
  }
  const double mm = static_cast<double>(m);
  const double nn = static_cast<double>(n);
  return std::sqrt(std::log(2.0 / alpha) / 2.0 * (mm + nn) / (mm * nn));
}

// Method of moments: the fitted law reproduces the sample mean and variance
// exactly.
inline GumbelParams fit_gumbel_moments(const SampleSummary& summary) {
  if (!(summary.variance > 0.0)) {
    throw std::domain_error("fit_gumbel_moments: degenerate sample (zero variance)");
  }
  const double beta = std::sqrt(6.0 * summary.variance) / std::numbers::pi;
  return {summary.mean - kEulerMascheroni * beta, beta};
}

namespace detail {

// Profile-likelihood score for beta, g(beta) = beta - mean(x) + S1/S0 with
// S_k = sum x^k exp(-x/beta). Strictly increasing in beta, so the root is
// unique. Exponentials are shifted by max(x) to avoid underflow.
struct GumbelScore {
  std::span<const double> values;
  double mean;
  double shift;  // max(x)

  struct Eval {
    double g;
    double dg;
    double log_mean_exp;  // log((1/M) sum exp(-x/beta)), pre-shift
  };

  Eval operator()(double beta) const {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (double x : values) {
      const double w = std::exp((x - shift) / -beta);
      s0 += w;
      s1 += x * w;
      s2 += x * x * w;
    }
    const double ratio = s1 / s0;
    Eval eval;
    eval.g = beta - mean + ratio;
    eval.dg = 1.0 + (s2 / s0 - ratio * ratio) / (beta * beta);
    eval.log_mean_exp =
        -shift / beta + std::log(s0 / static_cast<double>(values.size()));
    return eval;
  }
};

}  // namespace detail

// Residual |g(beta)|/beta of the profile equation; small at any good fit.
inline double gumbel_mle_residual(std::span<const double> values, const GumbelParams& fit) {
  SampleSummary summary = summarize(values);
  detail::GumbelScore score{values, summary.mean, summary.max};
  return std::fabs(score(fit.beta).g) / fit.beta;
}

// Maximum-likelihood Gumbel fit. beta solves the implicit profile equation
// (safeguarded Newton inside a sign-changing bracket seeded by the moments
// estimate); mu then follows in closed form.
inline GumbelParams fit_gumbel_mle(std::span<const double> values) {
  if (values.size() < 2) {
    throw std::domain_error("fit_gumbel_mle: need at least 2 values");
  }
  const SampleSummary summary = summarize(values);
  if (!(summary.variance > 0.0)) {
    throw std::domain_error("fit_gumbel_mle: degenerate sample (zero variance)");
  }
  const detail::GumbelScore score{values, summary.mean, summary.max};

  const double beta0 = fit_gumbel_moments(summary).beta;
  double lo = beta0 / 10.0;
  double hi = beta0 * 10.0;
  // g < 0 for small beta, g > 0 for large beta; widen if the seed bracket
  // does not straddle the root.
  int widen = 0;
  while (score(lo).g > 0.0 && widen++ < 60) lo /= 10.0;
  widen = 0;
  while (score(hi).g < 0.0 && widen++ < 60) hi *= 10.0;

  double beta = beta0;
  detail::GumbelScore::Eval eval = score(beta);
  const double tol = 1e-11 * beta0;
  int iter = 0;
  constexpr int kMaxIter = 200;
  while (std::fabs(eval.g) > tol && iter++ < kMaxIter) {
    if (eval.g > 0.0) hi = std::min(hi, beta); else lo = std::max(lo, beta);
    double next = beta - eval.g / eval.dg;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    beta = next;
    eval = score(beta);
  }
  if (std::fabs(eval.g) > 1e-8 * beta) {
    throw std::runtime_error(
        "fit_gumbel_mle: no convergence after " + std::to_string(iter) +
        " iterations; beta=" + std::to_string(beta) +
        " residual=" + std::to_string(eval.g / beta));
  }
  return {-beta * eval.log_mean_exp, beta};
}

inline GumbelParams fit_gumbel_mle(const TrialSample& sample) {
  return fit_gumbel_mle(std::span<const double>(sample.values));
}

}  // namespace traceback
