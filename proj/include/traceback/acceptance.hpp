#pragma once

#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "traceback/attack_model.hpp"
#include "traceback/edge_sampling.hpp"
#include "traceback/simulators.hpp"
#include "traceback/stats.hpp"
#include "traceback/theory.hpp"

namespace traceback {

// End-to-end verification harness. The default profile runs at the reference
// scale (n = 10^4, lambda = 1, M = 10^5); the quick profile shrinks to
// n = 10^3, M = 10^4 and doubles the statistical tolerances. All randomness
// is seeded from options.seed, so a given build always produces the same
// verdicts.
struct VerifyOptions {
  bool quick = false;
  std::uint64_t seed = 42;
  int workers = 0;
};

struct VerifyCheck {
  std::string id;
  bool pass = false;
  std::string detail;
};

namespace detail {

inline std::string strf(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

inline SampleSummary normalized_summary(const SampleSummary& raw, double center, double scale) {
  SampleSummary out;
  out.count = raw.count;
  out.mean = (raw.mean - center) / scale;
  out.variance = raw.variance / (scale * scale);
  out.min = (raw.min - center) / scale;
  out.max = (raw.max - center) / scale;
  out.sorted.reserve(raw.sorted.size());
  for (double v : raw.sorted) out.sorted.push_back((v - center) / scale);
  return out;
}

}  // namespace detail

inline std::vector<VerifyCheck> run_verification(const VerifyOptions& options) {
  using detail::strf;
  std::vector<VerifyCheck> checks;
  const bool quick = options.quick;
  const double widen = quick ? 2.0 : 1.0;

  const std::int64_t n = quick ? 1000 : 10000;
  const std::int64_t trials = quick ? 10000 : 100000;
  const double lambda = 1.0;
  const std::uint64_t seed = options.seed;
  const int workers = options.workers;

  const PathParameters path{n, lambda};
  const CouponDistribution dist = build_distribution(path);
  const TheoryPrediction theory = limit_law(n, lambda);
  const double se_limit =
      std::sqrt(gumbel_variance(theory.raw_law) / static_cast<double>(trials));

  const TrialSample continuous = simulate_continuous(dist, trials, seed + 1, workers);
  const TrialSample coupled = simulate_discrete_coupled(dist, trials, seed + 2, workers);
  const SampleSummary cont_summary = summarize(continuous);
  const SampleSummary coup_summary = summarize(coupled);

  // 1. Sample means of both engines against the reference-scale results
  //    (means 207885 continuous / 207945 discrete at n = 10^4, M = 10^5)
  //    within 3 standard errors, and against the asymptotic main term within
  //    one error scale. The quick profile has no reference means at its
  //    scale, so it checks against the numeric-quadrature expectation.
  {
    const double main_term = theory.main_term;
    const double error_scale = theory.error_scale;
    bool pass;
    std::string detail;
    if (!quick) {
      const double ref_cont = 207885.0;
      const double ref_disc = 207945.0;
      const bool cont_ref = std::fabs(cont_summary.mean - ref_cont) <= 3.0 * se_limit;
      const bool disc_ref = std::fabs(coup_summary.mean - ref_disc) <= 3.0 * se_limit;
      const bool cont_main = std::fabs(cont_summary.mean - main_term) <= error_scale;
      const bool disc_main = std::fabs(coup_summary.mean - main_term) <= error_scale;
      pass = cont_ref && disc_ref && cont_main && disc_main;
      detail = strf("cont mean=%.1f (ref %.0f, 3se=%.1f) disc mean=%.1f (ref %.0f); "
                    "main=%.1f err_scale=%.1f gaps %.1f/%.1f",
                    cont_summary.mean, ref_cont, 3.0 * se_limit, coup_summary.mean,
                    ref_disc, main_term, error_scale,
                    cont_summary.mean - main_term, coup_summary.mean - main_term);
    } else {
      const double exact_mean = expected_time_quadrature(dist);
      const double se_cont = std::sqrt(cont_summary.variance / static_cast<double>(trials));
      const double se_disc = std::sqrt(coup_summary.variance / static_cast<double>(trials));
      const bool cont_ok = std::fabs(cont_summary.mean - exact_mean) <= 3.0 * se_cont;
      const bool disc_ok = std::fabs(coup_summary.mean - exact_mean) <= 3.0 * se_disc;
      const bool main_ok = std::fabs(exact_mean - main_term) <= error_scale;
      pass = cont_ok && disc_ok && main_ok;
      detail = strf("cont mean=%.1f disc mean=%.1f exact=%.1f (3se %.1f/%.1f); "
                    "|exact-main|=%.1f <= %.1f",
                    cont_summary.mean, coup_summary.mean, exact_mean, 3.0 * se_cont,
                    3.0 * se_disc, std::fabs(exact_mean - main_term), error_scale);
    }
    checks.push_back({"1-reference-means", pass, detail});
  }

  // 2. Equality of the discrete and continuous expectations: at full scale
  //    via the two big samples, at small n against the inclusion-exclusion
  //    expectation with M = 10^6 per engine.
  {
    const double diff = std::fabs(coup_summary.mean - cont_summary.mean);
    const double tol = 3.0 * std::sqrt((coup_summary.variance + cont_summary.variance) /
                                       static_cast<double>(trials));
    bool pass = diff <= tol;
    std::string detail = strf("|disc-cont|=%.2f <= %.2f", diff, tol);

    const std::int64_t small_trials = quick ? 100000 : 1000000;
    const std::vector<std::int64_t> small_ns = quick ? std::vector<std::int64_t>{2, 5}
                                                     : std::vector<std::int64_t>{2, 5, 10};
    for (std::int64_t small_n : small_ns) {
      const CouponDistribution small_dist = build_distribution({small_n, 1.0});
      const double exact = exact_expected_time(small_dist);
      const TrialSample engines[3] = {
          simulate_discrete_naive(small_dist, small_trials, seed + 10 + static_cast<std::uint64_t>(small_n), workers),
          simulate_discrete_coupled(small_dist, small_trials, seed + 40 + static_cast<std::uint64_t>(small_n), workers),
          simulate_continuous(small_dist, small_trials, seed + 70 + static_cast<std::uint64_t>(small_n), workers)};
      for (const TrialSample& engine_sample : engines) {
        const SampleSummary s = summarize(engine_sample);
        const double se = std::sqrt(s.variance / static_cast<double>(small_trials));
        const double gap = std::fabs(s.mean - exact);
        if (gap > 3.0 * se) {
          pass = false;
          detail += strf("; n=%lld %s mean=%.4f exact=%.4f gap=%.4f > 3se=%.4f",
                         static_cast<long long>(small_n),
                         std::string(model_name(engine_sample.model)).c_str(), s.mean,
                         exact, gap, 3.0 * se);
        }
      }
    }
    if (pass) {
      detail += strf("; small-n engines match inclusion-exclusion at M=%lld",
                     static_cast<long long>(small_trials));
    }
    checks.push_back({"2-expectation-equality", pass, detail});
  }

  // 3. Distance of the normalized discrete sample from the limiting law,
  //    against the band half-width 0.25*lnln(n)/ln(n), plus pointwise band
  //    containment of the ECDF. The quick profile doubles the band constant.
  {
    const SampleSummary normalized =
        detail::normalized_summary(coup_summary, theory.center, theory.scale);
    const double ks = ks_distance(normalized, [&theory](double x) {
      return gumbel_cdf(x, theory.normalized_law);
    });
    const double half = widen * cdf_band_halfwidth(n);

    double above = 0.0;  // ECDF pushing over the upper band edge
    double below = 0.0;  // ECDF falling under the lower band edge
    const double m = static_cast<double>(coup_summary.count);
    for (std::size_t i = 0; i < coup_summary.sorted.size(); ++i) {
      const double f = gumbel_cdf((coup_summary.sorted[i] - theory.center) / theory.scale,
                                  theory.normalized_law);
      const double upper = std::min(f + half, 1.0);
      const double lower = std::max(f - half, 0.0);
      above = std::max(above, static_cast<double>(i + 1) / m - upper);
      below = std::max(below, lower - static_cast<double>(i) / m);
    }
    const bool pass = ks <= half && above <= 0.0 && below <= 0.0;
    checks.push_back({"3-limit-law-band", pass,
                      strf("ks=%.5f band=%.5f; band violations above=%.5f below=%.5f",
                           ks, half, above, below)});
  }

  // 4. Continuous ECDF against the exact finite-n product CDF within the
  //    99% DKW envelope. An exact-law test: no asymptotics involved.
  {
    const double bound = dkw_epsilon(trials, 0.01);
    const double ks = ks_distance(cont_summary, [&dist](double t) {
      return exact_continuous_cdf(t, dist);
    });
    checks.push_back({"4-exact-cdf-dkw", ks <= bound,
                      strf("ks=%.5f <= dkw=%.5f", ks, bound)});
  }

  // 5. Pairwise engine equivalence by two-sample Kolmogorov tests at the 1%
  //    level: naive vs coupled on small paths, packet-level vs naive.
  {
    bool pass = true;
    std::string detail;
    struct Case { std::int64_t n; double lambda; };
    const Case cases[3] = {{2, 1.0}, {3, 1.0}, {8, 0.5}};
    const std::int64_t pair_trials = quick ? 10000 : 100000;
    for (const Case& c : cases) {
      const CouponDistribution d = build_distribution({c.n, c.lambda});
      const SampleSummary a =
          summarize(simulate_discrete_naive(d, pair_trials, seed + 100 + static_cast<std::uint64_t>(c.n), workers));
      const SampleSummary b =
          summarize(simulate_discrete_coupled(d, pair_trials, seed + 200 + static_cast<std::uint64_t>(c.n), workers));
      const double ks = ks_two_sample(a, b);
      const double thr = ks_two_sample_threshold(pair_trials, pair_trials, 0.01);
      pass = pass && ks <= thr;
      detail += strf("n=%lld,l=%.1f ks=%.5f<=%.5f; ", static_cast<long long>(c.n),
                     c.lambda, ks, thr);
    }
    const std::int64_t packet_trials = 10000;
    const PathParameters p8{8, 1.0};
    const SampleSummary packet =
        summarize(simulate_packet_level(p8, packet_trials, seed + 300, workers));
    const SampleSummary naive8 =
        summarize(simulate_discrete_naive(build_distribution(p8), packet_trials, seed + 301, workers));
    const double ks = ks_two_sample(packet, naive8);
    const double thr = ks_two_sample_threshold(packet_trials, packet_trials, 0.01);
    pass = pass && ks <= thr;
    detail += strf("packet n=8 ks=%.5f<=%.5f", ks, thr);
    checks.push_back({"5-engine-equivalence", pass, detail});
  }

  // 6. Marking law of the packet-level protocol: chi-square over the 17
  //    outcome bins (16 edges + unmarked) at n = 16 against the coupon
  //    probabilities, 1% critical value of chi-square with 16 dof = 32.0.
  {
    const PathParameters p16{16, 1.0};
    const CouponDistribution d16 = build_distribution(p16);
    const std::int64_t packets = quick ? 100000 : 1000000;
    Xoshiro256pp rng = Xoshiro256pp::for_trial(seed + 400, 0);
    std::vector<std::int64_t> observed(17, 0);
    for (std::int64_t i = 0; i < packets; ++i) {
      const PacketMark mark = transmit_packet(p16, rng);
      ++observed[static_cast<std::size_t>(mark.marked ? mark.distance + 1 : 0)];
    }
    double chi2 = 0.0;
    for (std::size_t type = 0; type <= 16; ++type) {
      const double expected = d16.probabilities[type] * static_cast<double>(packets);
      const double delta = static_cast<double>(observed[type]) - expected;
      chi2 += delta * delta / expected;
    }
    const double critical = 32.0;
    checks.push_back({"6-marking-chi-square", chi2 <= critical,
                      strf("chi2=%.2f <= %.1f over 17 bins, %lld packets", chi2,
                           critical, static_cast<long long>(packets))});
  }

  // 7. The coupling sandwich on the discrete CDF, evaluated at the main term
  //    plus -2..2 path lengths.
  {
    bool pass = true;
    std::string detail;
    for (int k = -2; k <= 2; ++k) {
      const double d = theory.main_term + static_cast<double>(k) * static_cast<double>(n);
      const auto [lower, upper] = coupling_bounds(d, dist);
      const double empirical = coup_summary.ecdf(d);
      const bool ok = lower <= empirical && empirical <= upper;
      pass = pass && ok;
      detail += strf("d=main%+d*n F=%.4f in [%.4f,%.4f]%s; ", k, empirical, lower,
                     upper, ok ? "" : " FAIL");
    }
    checks.push_back({"7-coupling-bounds", pass, detail});
  }

  // 8. Parameter estimation. Method of moments on the reference inputs must
  //    reproduce (193800, 24506) to 4 significant figures; maximum
  //    likelihood must recover synthetic parameters within 1% (2% quick)
  //    with a small profile-equation residual; the fits of the big discrete
  //    sample must land in the reference ranges.
  {
    const double target_beta = 24506.0;
    const double target_mu = 193800.0;
    SampleSummary reference;
    reference.count = 100000;
    reference.mean = 207945.0;
    {
      const double sigma = target_beta * std::numbers::pi / std::sqrt(6.0);
      reference.variance = sigma * sigma;
    }
    const GumbelParams moments = fit_gumbel_moments(reference);
    const bool moments_ok = std::fabs(moments.mu / target_mu - 1.0) < 5e-5 &&
                            std::fabs(moments.beta / target_beta - 1.0) < 5e-5;

    const GumbelParams truth{0.0, std::numbers::e};
    const std::int64_t draws = quick ? 100000 : 1000000;
    std::vector<double> synthetic(static_cast<std::size_t>(draws));
    Xoshiro256pp rng = Xoshiro256pp::for_trial(seed + 500, 0);
    for (auto& v : synthetic) v = sample_gumbel(truth, rng);
    const GumbelParams mle = fit_gumbel_mle(std::span<const double>(synthetic));
    const double residual = gumbel_mle_residual(synthetic, mle);
    const double tol = 0.01 * widen;
    const bool mle_ok = std::fabs(mle.mu) <= tol * truth.beta &&
                        std::fabs(mle.beta / truth.beta - 1.0) <= tol &&
                        residual < 1e-8;

    bool range_ok = true;
    std::string range_detail;
    if (!quick) {
      const GumbelParams big_mle = fit_gumbel_mle(coupled);
      const GumbelParams big_mom = fit_gumbel_moments(coup_summary);
      range_ok = big_mle.beta >= 23000.0 && big_mle.beta <= 26000.0 &&
                 big_mle.mu >= 192500.0 && big_mle.mu <= 195500.0 &&
                 gumbel_mle_residual(coupled.values, big_mle) < 1e-8;
      range_detail = strf("; big-sample mle=(%.0f,%.0f) mom=(%.0f,%.0f)", big_mle.mu,
                          big_mle.beta, big_mom.mu, big_mom.beta);
    }
    checks.push_back(
        {"8-estimators", moments_ok && mle_ok && range_ok,
         strf("moments=(%.1f,%.1f) vs (%.0f,%.0f); mle=(%.4f,%.4f) vs (0,e) "
              "residual=%.2e%s",
              moments.mu, moments.beta, target_mu, target_beta, mle.mu, mle.beta,
              residual, range_detail.c_str())});
  }

  // 9. Distribution kernels: sampled moments match the closed forms within
  //    1% (2% quick), and the quantile/CDF round trip is tight.
  {
    bool pass = true;
    std::string detail;
    const std::int64_t draws = quick ? 100000 : 1000000;
    const GumbelParams laws[2] = {{0.0, 1.0}, {190008.0, 27183.0}};
    const double tol = 0.01 * widen;
    int law_index = 0;
    for (const GumbelParams& law : laws) {
      Xoshiro256pp rng = Xoshiro256pp::for_trial(seed + 600 + static_cast<std::uint64_t>(law_index++), 0);
      double mean = 0.0, m2 = 0.0;
      for (std::int64_t i = 0; i < draws; ++i) {
        const double v = sample_gumbel(law, rng);
        const double delta = v - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (v - mean);
      }
      const double variance = m2 / static_cast<double>(draws - 1);
      const double mean_err = std::fabs(mean - gumbel_mean(law)) /
                              std::max(std::fabs(gumbel_mean(law)), law.beta);
      const double var_err = std::fabs(variance / gumbel_variance(law) - 1.0);
      pass = pass && mean_err <= tol && var_err <= tol;
      detail += strf("law(%.0f,%.0f): mean_err=%.4f var_err=%.4f; ", law.mu, law.beta,
                     mean_err, var_err);
    }
    double worst_roundtrip = 0.0;
    const GumbelParams unit{0.0, 1.0};
    for (int j = 0; j <= 1000; ++j) {
      double q = static_cast<double>(j) / 1000.0;
      q = std::min(std::max(q, 1e-6), 1.0 - 1e-6);
      worst_roundtrip =
          std::max(worst_roundtrip, std::fabs(gumbel_cdf(gumbel_quantile(q, unit), unit) - q));
    }
    pass = pass && worst_roundtrip < 1e-10;
    detail += strf("roundtrip=%.2e", worst_roundtrip);
    checks.push_back({"9-distribution-kernels", pass, detail});
  }

  return checks;
}

inline int print_verification(const std::vector<VerifyCheck>& checks, std::ostream& out) {
  int failures = 0;
  for (const VerifyCheck& check : checks) {
    out << (check.pass ? "PASS" : "FAIL") << "  " << check.id << ": " << check.detail
        << "\n";
    if (!check.pass) ++failures;
  }
  out << (failures == 0 ? "all checks passed" : detail::strf("%d check(s) failed", failures))
      << "\n";
  return failures;
}

}  // namespace traceback
