#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "greenport/cli/experiment.hpp"
#include "greenport/trainer/trainer.hpp"

namespace greenport::cli {

// Entry point shared by the executable and the integration tests.
// Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Writes <out>/<name>.csv for every generated greenhouse plus manifest.json.
void cmd_generate(const ExperimentSpec& spec, std::ostream& log);

// Reads the datasets and builds one phase per greenhouse, in spec order.
// Test subsets come from the "test-sampling/<name>" stream of the root seed.
ScenarioConfig build_scenario(const ExperimentSpec& spec, std::size_t* clamp_count = nullptr);

// curve.csv, curve.boundaries.csv, checkpoint.bin, run_summary.json, and
// retention.csv / memory.csv when requested.
void cmd_run(const ExperimentSpec& spec, std::ostream& log);

// baseline_<phase>.csv and its boundaries sidecar.
void cmd_baseline(const ExperimentSpec& spec, const std::string& phase, std::ostream& log);

struct ComparisonRow {
  std::string phase;
  std::size_t start_update = 0;
  double transferred_first_mse = 0.0;
  double fresh_first_mse = 0.0;
  double ratio = 0.0;
  bool pass = false;  // transferred < fresh
};

std::vector<ComparisonRow> compare_curves(const LearningCurve& run, const std::vector<LearningCurve>& baselines);

// Writes comparison.csv into out_dir and echoes the table to log.
std::vector<ComparisonRow> cmd_compare(const std::filesystem::path& run_curve,
                                       const std::vector<std::filesystem::path>& baseline_curves,
                                       const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace greenport::cli
