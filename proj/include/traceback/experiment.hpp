#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "traceback/attack_model.hpp"
#include "traceback/edge_sampling.hpp"
#include "traceback/simulators.hpp"
#include "traceback/stats.hpp"
#include "traceback/theory.hpp"

namespace traceback {

enum class OutputFormat { kCsv, kJson };

inline std::string_view format_name(OutputFormat format) {
  return format == OutputFormat::kCsv ? "csv" : "json";
}

inline OutputFormat format_from_name(std::string_view name) {
  if (name == "csv") return OutputFormat::kCsv;
  if (name == "json") return OutputFormat::kJson;
  throw std::invalid_argument("unknown output format: " + std::string(name));
}

// Everything needed to rerun one experiment bit-for-bit.
struct ExperimentConfig {
  std::int64_t path_length = 10000;  // n
  double lambda = 1.0;
  std::int64_t trials = 100000;  // M
  Model model = Model::kDiscreteCoupled;
  std::uint64_t seed = 42;
  int workers = 0;  // 0 = available parallelism
  std::string out_dir = "out";
  OutputFormat format = OutputFormat::kCsv;

  void validate() const {
    PathParameters{path_length, lambda}.validate();
    if (trials < 1) throw std::domain_error("ExperimentConfig: trials must be >= 1");
    if (workers < 0) throw std::domain_error("ExperimentConfig: workers must be >= 0");
  }
};

inline void to_json(nlohmann::json& j, const ExperimentConfig& config) {
  j = nlohmann::json{{"model", model_name(config.model)},
                     {"n", config.path_length},
                     {"lambda", config.lambda},
                     {"trials", config.trials},
                     {"seed", config.seed},
                     {"workers", config.workers},
                     {"out_dir", config.out_dir},
                     {"format", format_name(config.format)}};
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& config) {
  config.model = model_from_name(j.at("model").get<std::string>());
  config.path_length = j.at("n").get<std::int64_t>();
  config.lambda = j.at("lambda").get<double>();
  config.trials = j.at("trials").get<std::int64_t>();
  config.seed = j.at("seed").get<std::uint64_t>();
  config.workers = j.at("workers").get<int>();
  config.out_dir = j.at("out_dir").get<std::string>();
  config.format = format_from_name(j.at("format").get<std::string>());
}

struct ExperimentReport {
  ExperimentConfig config;
  TrialSample sample;
  SampleSummary summary;
  std::optional<TheoryPrediction> theory;  // absent for n < 3
  // Comparison of the sample against the limit law (present with theory).
  double ks_normalized = 0.0;
  double band_halfwidth = 0.0;
  bool band_contained = false;
  double mean_gap = 0.0;  // sample mean - main term
  bool mean_within_error_scale = false;
  // Parameter fits (absent for degenerate samples).
  std::optional<GumbelParams> moments_fit;
  std::optional<GumbelParams> mle_fit;
  double mle_residual = 0.0;
  std::string fit_notice;
  double wall_seconds = 0.0;
  std::string trials_path;
  std::string summary_path;
};

namespace detail {

inline std::string resolved_out_dir(const ExperimentConfig& config) {
  if (const char* env = std::getenv("TRACEBACK_OUT_DIR"); env && *env) return env;
  return config.out_dir;
}

inline std::string seed_policy_comment(const ExperimentConfig& config) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "# model=%s n=%lld lambda=%.17g trials=%lld seed=%llu workers=%d "
                "(per-trial rng streams keyed by (seed, trial index))",
                std::string(model_name(config.model)).c_str(),
                static_cast<long long>(config.path_length), config.lambda,
                static_cast<long long>(config.trials),
                static_cast<unsigned long long>(config.seed), config.workers);
  return buf;
}

// Whole-file write through a temp path: either the full file appears or
// nothing does.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& body) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << body;
    if (!out.good()) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("failed to write " + path.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

inline void append_value(std::string& body, double value, bool integral) {
  char buf[40];
  if (integral) {
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(value));
  } else {
    std::snprintf(buf, sizeof(buf), "%.17g", value);
  }
  body += buf;
}

inline TrialSample run_model(const CouponDistribution& dist, const ExperimentConfig& config) {
  switch (config.model) {
    case Model::kDiscreteNaive:
      return simulate_discrete_naive(dist, config.trials, config.seed, config.workers);
    case Model::kContinuous:
      return simulate_continuous(dist, config.trials, config.seed, config.workers);
    case Model::kDiscreteCoupled:
      return simulate_discrete_coupled(dist, config.trials, config.seed, config.workers);
    case Model::kPacketLevel:
      return simulate_packet_level(dist.params, config.trials, config.seed, config.workers);
  }
  throw std::logic_error("run_model: unknown model");
}

}  // namespace detail

// Interpolated sample quantile (linear between order statistics).
inline double sample_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::domain_error("sample_quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("sample_quantile: q outside [0,1]");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline nlohmann::json report_to_json(const ExperimentReport& report) {
  nlohmann::json j;
  j["config"] = report.config;
  j["sample"] = {{"trials", report.summary.count},
                 {"mean", report.summary.mean},
                 {"variance", report.summary.variance},
                 {"min", report.summary.min},
                 {"max", report.summary.max}};
  if (report.theory) {
    const TheoryPrediction& t = *report.theory;
    j["theory"] = {{"main_term", t.main_term},
                   {"error_scale", t.error_scale},
                   {"center", t.center},
                   {"scale", t.scale},
                   {"normalized_law", {{"mu", t.normalized_law.mu}, {"beta", t.normalized_law.beta}}},
                   {"raw_law", {{"mu", t.raw_law.mu}, {"beta", t.raw_law.beta}}}};
    j["checks"] = {{"ks_normalized_vs_limit", report.ks_normalized},
                   {"band_halfwidth", report.band_halfwidth},
                   {"band_contained", report.band_contained},
                   {"mean_minus_main_term", report.mean_gap},
                   {"mean_within_error_scale", report.mean_within_error_scale}};
  } else {
    j["theory"] = nullptr;
    j["checks"] = nullptr;
  }
  if (report.moments_fit) {
    j["fits"] = {{"moments", {{"mu", report.moments_fit->mu}, {"beta", report.moments_fit->beta}}},
                 {"mle", {{"mu", report.mle_fit->mu}, {"beta", report.mle_fit->beta}}},
                 {"mle_residual", report.mle_residual}};
  } else {
    j["fits"] = nullptr;
    j["fit_notice"] = report.fit_notice;
  }
  j["outputs"] = {{"trials_path", report.trials_path}, {"summary_path", report.summary_path}};
  j["wall_seconds"] = report.wall_seconds;
  return j;
}

// Runs the configured engine, summarizes against the limit law, fits Gumbel
// parameters, and writes the per-trial values plus a JSON summary.
inline ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  const CouponDistribution dist = build_distribution({config.path_length, config.lambda});

  ExperimentReport report;
  report.config = config;
  report.sample = detail::run_model(dist, config);
  if (config.trials >= 2) {
    report.summary = summarize(report.sample);
  } else {
    report.summary.count = 1;
    report.summary.mean = report.sample.values[0];
    report.summary.min = report.summary.max = report.sample.values[0];
    report.summary.sorted = report.sample.values;
  }

  if (config.path_length >= 3) {
    const TheoryPrediction theory = limit_law(config.path_length, config.lambda);
    report.theory = theory;
    report.ks_normalized = ks_distance(report.summary, [&theory](double x) {
      return gumbel_cdf((x - theory.center) / theory.scale, theory.normalized_law);
    });
    report.band_halfwidth = cdf_band_halfwidth(config.path_length);
    report.band_contained = report.ks_normalized <= report.band_halfwidth;
    report.mean_gap = report.summary.mean - theory.main_term;
    report.mean_within_error_scale = std::fabs(report.mean_gap) <= theory.error_scale;
  }

  if (report.summary.variance > 0.0) {
    report.moments_fit = fit_gumbel_moments(report.summary);
    report.mle_fit = fit_gumbel_mle(std::span<const double>(report.sample.values));
    report.mle_residual = gumbel_mle_residual(report.sample.values, *report.mle_fit);
  } else {
    report.fit_notice = "degenerate sample (zero variance): parameter fits refused";
  }

  const std::filesystem::path out_dir = detail::resolved_out_dir(config);
  std::filesystem::create_directories(out_dir);

  const bool integral = config.model != Model::kContinuous;
  if (config.format == OutputFormat::kCsv) {
    std::string body = detail::seed_policy_comment(config) + "\n";
    body += "trial,value\n";
    for (std::int64_t t = 0; t < config.trials; ++t) {
      body += std::to_string(t);
      body += ',';
      detail::append_value(body, report.sample.values[static_cast<std::size_t>(t)], integral);
      body += '\n';
    }
    const auto path = out_dir / "trials.csv";
    detail::write_file_atomic(path, body);
    report.trials_path = path.string();
  } else {
    nlohmann::json trials;
    trials["config"] = config;
    if (integral) {
      std::vector<std::int64_t> ints(report.sample.values.size());
      for (std::size_t i = 0; i < ints.size(); ++i) {
        ints[i] = static_cast<std::int64_t>(report.sample.values[i]);
      }
      trials["values"] = ints;
    } else {
      trials["values"] = report.sample.values;
    }
    const auto path = out_dir / "trials.json";
    detail::write_file_atomic(path, trials.dump());
    report.trials_path = path.string();
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto summary_path = out_dir / "summary.json";
  report.summary_path = summary_path.string();
  detail::write_file_atomic(summary_path, report_to_json(report).dump(2) + "\n");
  return report;
}

struct PlotDataPaths {
  std::string histogram;
  std::string ecdf;
  std::string theory;  // empty when the limit law is unavailable (n < 3)
};

// Emits plain-CSV plot inputs: a density histogram with Freedman-Diaconis
// bins, the ECDF, and the limit-law pdf/cdf plus its band on a 512-point
// grid spanning the data range widened by 5% on each side.
inline PlotDataPaths emit_plot_data(const TrialSample& sample, const std::string& out_dir) {
  if (sample.values.empty()) throw std::domain_error("emit_plot_data: empty sample");
  if (sample.values.size() < 2) throw std::domain_error("emit_plot_data: need at least 2 values");
  const SampleSummary summary = summarize(sample);
  if (!(summary.max > summary.min)) {
    throw std::domain_error("emit_plot_data: degenerate sample (all values equal)");
  }

  ExperimentConfig header_config;
  header_config.model = sample.model;
  header_config.path_length = sample.path_length;
  header_config.lambda = sample.lambda;
  header_config.trials = sample.trial_count;
  header_config.seed = sample.seed;
  const std::string comment = detail::seed_policy_comment(header_config);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir = out_dir;
  PlotDataPaths paths;
  const double m = static_cast<double>(summary.count);

  // Histogram, Freedman-Diaconis bin width.
  const double iqr = sample_quantile(summary.sorted, 0.75) - sample_quantile(summary.sorted, 0.25);
  double width = 2.0 * iqr / std::cbrt(m);
  if (!(width > 0.0)) width = (summary.max - summary.min) / std::sqrt(m);
  const std::int64_t bin_count = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil((summary.max - summary.min) / width)));
  std::vector<std::int64_t> counts(static_cast<std::size_t>(bin_count), 0);
  for (double v : summary.sorted) {
    auto bin = static_cast<std::int64_t>((v - summary.min) / width);
    bin = std::clamp<std::int64_t>(bin, 0, bin_count - 1);
    ++counts[static_cast<std::size_t>(bin)];
  }
  {
    std::string body = comment + "\n";
    body += "bin_left,bin_right,density\n";
    char buf[128];
    for (std::int64_t b = 0; b < bin_count; ++b) {
      const double left = summary.min + static_cast<double>(b) * width;
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", left, left + width,
                    static_cast<double>(counts[static_cast<std::size_t>(b)]) / (m * width));
      body += buf;
    }
    const auto path = dir / "histogram.csv";
    detail::write_file_atomic(path, body);
    paths.histogram = path.string();
  }

  {
    std::string body = comment + "\n";
    body += "x,ecdf\n";
    char buf[96];
    for (std::size_t i = 0; i < summary.sorted.size(); ++i) {
      if (i + 1 < summary.sorted.size() && summary.sorted[i + 1] == summary.sorted[i]) continue;
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", summary.sorted[i],
                    static_cast<double>(i + 1) / m);
      body += buf;
    }
    const auto path = dir / "ecdf.csv";
    detail::write_file_atomic(path, body);
    paths.ecdf = path.string();
  }

  if (sample.path_length >= 3) {
    const TheoryPrediction theory = limit_law(sample.path_length, sample.lambda);
    const double half = cdf_band_halfwidth(sample.path_length);
    const double range = summary.max - summary.min;
    const double lo = summary.min - 0.05 * range;
    const double hi = summary.max + 0.05 * range;
    constexpr int kGridPoints = 512;
    std::string body = comment + "\n";
    body += "value,limit_pdf,limit_cdf,band_lower,band_upper\n";
    char buf[192];
    for (int g = 0; g < kGridPoints; ++g) {
      const double x = lo + (hi - lo) * static_cast<double>(g) / (kGridPoints - 1);
      const double cdf = gumbel_cdf(x, theory.raw_law);
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", x,
                    gumbel_pdf(x, theory.raw_law), cdf,
                    std::clamp(cdf - half, 0.0, 1.0), std::clamp(cdf + half, 0.0, 1.0));
      body += buf;
    }
    const auto path = dir / "theory.csv";
    detail::write_file_atomic(path, body);
    paths.theory = path.string();
  }
  return paths;
}

}  // namespace traceback
