#pragma once

#include "socv/conditions.hpp"
#include "socv/config_parser.hpp"
#include "socv/forward.hpp"
#include "socv/oracles/lq.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace socv {

/// Candidate-control descriptor from the scenario file.
struct CandidateControl {
  std::string type;  // riccati | constant | open_loop | feedback | perturbed
  Vector constant;
  Matrix table;                 // open_loop, d x N
  std::string feedback_id;      // zero | linear
  Matrix feedback_gain;         // linear: u = offset - K x
  Vector feedback_offset;
  bool project = false;         // clip through the control set
  std::shared_ptr<CandidateControl> base;  // perturbed
  Vector offset;
  double scale = 1.0;
};

/// Declarative form of one verification run.
struct ScenarioConfig {
  // problem
  std::string family;  // lq | bilinear
  int n = 0, m = 0, d = 0;
  double horizon = 1.0;
  Vector x0;
  Vector eigenvalues;
  LQParams lq;
  BilinearParams bilinear;
  ControlSet control_set = ControlSet::whole_space(1);

  // numerics
  int steps = 64;
  int paths = 4096;
  uint64_t seed = 42;
  RegressionConfig regression;
  int threads = 1;

  // checks
  std::vector<std::string> checks;
  ConditionTolerances tolerances;
  double tol_identity = 5e-2;
  int directions = 5;
  uint64_t direction_seed = 2024;
  bool gradient_direction = false;
  int trials = 32;
  uint64_t trial_seed = 7;

  CandidateControl candidate;

  // output
  std::string out_dir;  // empty: SOCV_OUT_DIR env or current directory
  std::string report_name = "summary.json";
  std::string csv_name = "trace.csv";

  ProblemSpec build_problem() const;
  oracles::LQData build_lq_data() const;  // lq family only
};

/// Valid check identifiers, in canonical execution order.
const std::vector<std::string>& check_registry();

/// Parses and validates a scenario file; throws ConfigError carrying every
/// validation message (not just the first).
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig load_scenario_node(const ConfigNode& root);

/// Flag overrides beating config values.
struct ScenarioOverrides {
  std::optional<int> paths;
  std::optional<int> steps;
  std::optional<uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
};

struct ScenarioResult {
  int exit_status = 1;  // 0 pass, 2 violated, 3 inconclusive, 1 error
  std::vector<ConditionReport> reports;
  std::string report_path;
  std::string csv_path;
};

/// Executes the scenario: forward simulation at the candidate control,
/// adjoint solves as needed, every requested check, then the summary
/// document and the per-step residual-trace CSV. Byte-identical outputs for
/// identical (config, seed), at any thread count.
ScenarioResult run_scenario(const ScenarioConfig& cfg,
                            const ScenarioOverrides& overrides = {});

}  // namespace socv
