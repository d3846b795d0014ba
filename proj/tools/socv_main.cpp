#include "socv/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"socv - stochastic optimal control condition verifier"};
  app.require_subcommand(1);

  auto* verify = app.add_subcommand(
      "verify", "Run a scenario file and verify the requested conditions");
  std::string config_path;
  verify->add_option("--config", config_path, "Scenario configuration file")
      ->required();
  int paths = -1, steps = -1, threads = -1;
  long long seed = -1;
  std::string out_dir;
  verify->add_option("--paths", paths, "Override the Monte Carlo path count");
  verify->add_option("--steps", steps, "Override the time-step count");
  verify->add_option("--seed", seed, "Override the master seed");
  verify->add_option("--out", out_dir, "Output directory for summary and CSV");
  verify->add_option("--threads", threads, "Worker threads (default: config)");

  CLI11_PARSE(app, argc, argv);

  try {
    const socv::ScenarioConfig cfg = socv::load_scenario(config_path);
    socv::ScenarioOverrides overrides;
    if (paths > 0) overrides.paths = paths;
    if (steps > 0) overrides.steps = steps;
    if (seed >= 0) overrides.seed = static_cast<uint64_t>(seed);
    if (!out_dir.empty()) overrides.out_dir = out_dir;
    if (threads > 0) overrides.threads = threads;

    const socv::ScenarioResult result = socv::run_scenario(cfg, overrides);
    if (result.exit_status != 1) {
      std::printf("summary: %s\n", result.report_path.c_str());
      std::printf("csv:     %s\n", result.csv_path.c_str());
      for (const auto& report : result.reports) {
        std::printf("%-24s %-12s value=%.6g stderr=%.6g viol=%.4f max=%.6g\n",
                    report.id.c_str(), to_string(report.verdict).c_str(),
                    report.value, report.std_error, report.violation_measure,
                    report.max_residual);
      }
    }
    return result.exit_status;
  } catch (const socv::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
