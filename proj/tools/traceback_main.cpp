#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "traceback/acceptance.hpp"
#include "traceback/experiment.hpp"

namespace {

struct CliOptions {
  traceback::ExperimentConfig config;
  std::string config_path;
  std::string model = "discrete-coupled";
  std::string format = "csv";
  bool plot_data = false;
};

void add_experiment_flags(CLI::App* cmd, CliOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file; explicit flags override its fields");
  cmd->add_option("--model", opts.model,
                  "discrete-naive | discrete-coupled | continuous | packet-level");
  cmd->add_option("--n", opts.config.path_length, "path length (number of routers)");
  cmd->add_option("--lambda", opts.config.lambda, "marking-rate coefficient; p = lambda/n");
  cmd->add_option("--M", opts.config.trials, "number of trials");
  cmd->add_option("--seed", opts.config.seed, "base RNG seed");
  cmd->add_option("--workers", opts.config.workers, "worker threads (0 = all cores)");
  cmd->add_option("--out", opts.config.out_dir,
                  "output directory (env TRACEBACK_OUT_DIR overrides)");
  cmd->add_option("--format", opts.format, "trial-values file format: csv | json");
}

traceback::ExperimentConfig resolve_config(const CLI::App* cmd, CliOptions& opts) {
  traceback::ExperimentConfig config = opts.config;
  config.model = traceback::model_from_name(opts.model);
  config.format = traceback::format_from_name(opts.format);
  if (opts.config_path.empty()) return config;

  std::ifstream in(opts.config_path);
  if (!in.good()) {
    throw CLI::ValidationError("--config", "cannot read " + opts.config_path);
  }
  traceback::ExperimentConfig from_file;
  try {
    nlohmann::json j;
    in >> j;
    from_file = j.get<traceback::ExperimentConfig>();
  } catch (const std::exception& e) {
    throw CLI::ValidationError("--config", "corrupted config file: " + std::string(e.what()));
  }
  // Explicit flags override the file.
  auto given = [cmd](const std::string& flag) { return cmd->count(flag) > 0; };
  if (given("--model")) from_file.model = config.model;
  if (given("--n")) from_file.path_length = config.path_length;
  if (given("--lambda")) from_file.lambda = config.lambda;
  if (given("--M")) from_file.trials = config.trials;
  if (given("--seed")) from_file.seed = config.seed;
  if (given("--workers")) from_file.workers = config.workers;
  if (given("--out")) from_file.out_dir = config.out_dir;
  if (given("--format")) from_file.format = config.format;
  return from_file;
}

int run_command(const CLI::App* cmd, CliOptions& opts) {
  const traceback::ExperimentConfig config = resolve_config(cmd, opts);
  try {
    config.validate();
  } catch (const std::exception& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  }
  const traceback::ExperimentReport report = traceback::run_experiment(config);
  std::cout << traceback::report_to_json(report).dump(2) << "\n";
  if (opts.plot_data) {
    const auto paths =
        traceback::emit_plot_data(report.sample, traceback::detail::resolved_out_dir(config));
    std::cout << "plot data: " << paths.histogram << " " << paths.ecdf;
    if (!paths.theory.empty()) std::cout << " " << paths.theory;
    std::cout << "\n";
  }
  return 0;
}

int plot_data_command(const CLI::App* cmd, CliOptions& opts) {
  const traceback::ExperimentConfig config = resolve_config(cmd, opts);
  try {
    config.validate();
  } catch (const std::exception& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  }
  const traceback::CouponDistribution dist =
      traceback::build_distribution({config.path_length, config.lambda});
  const traceback::TrialSample sample = traceback::detail::run_model(dist, config);
  const auto paths =
      traceback::emit_plot_data(sample, traceback::detail::resolved_out_dir(config));
  std::cout << "wrote " << paths.histogram << "\n" << "wrote " << paths.ecdf << "\n";
  if (!paths.theory.empty()) std::cout << "wrote " << paths.theory << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge-sampling reconstruction-time simulator and analyzer"};
  app.require_subcommand(1);

  CliOptions run_opts;
  CLI::App* run = app.add_subcommand("run", "run one experiment and write trials + summary");
  add_experiment_flags(run, run_opts);
  run->add_flag("--plot-data", run_opts.plot_data, "also emit histogram/ecdf/theory CSVs");

  CliOptions plot_opts;
  CLI::App* plot = app.add_subcommand("plot-data", "run the engine and emit plot CSVs only");
  add_experiment_flags(plot, plot_opts);

  traceback::VerifyOptions verify_opts;
  CLI::App* verify = app.add_subcommand("verify", "run the full verification suite");
  verify->add_flag("--quick", verify_opts.quick, "reduced scale (n=10^3, M=10^4), widened tolerances");
  verify->add_option("--seed", verify_opts.seed, "base RNG seed");
  verify->add_option("--workers", verify_opts.workers, "worker threads (0 = all cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(run, run_opts);
    if (plot->parsed()) return plot_data_command(plot, plot_opts);
    if (verify->parsed()) {
      const auto checks = traceback::run_verification(verify_opts);
      return traceback::print_verification(checks, std::cout) == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
