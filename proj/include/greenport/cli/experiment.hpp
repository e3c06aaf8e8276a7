#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "greenport/data/climate.hpp"
#include "greenport/data/window.hpp"
#include "greenport/memory/episodic_memory.hpp"
#include "greenport/model/lstm.hpp"
#include "json.hpp"

namespace greenport::cli {

// Bad input from the user: exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Named bundle of defaults. "desk" runs the whole pipeline in minutes;
// "paper" carries the full-scale protocol constants.
struct Preset {
  std::string name;
  ModelConfig model;
  MemoryConfig memory;
  std::size_t batch_size = 100;
  std::size_t replay_size = 100;
  std::size_t eval_every = 3;
  std::size_t test_size = 10000;
  std::size_t stride = 2;
  std::size_t days = 30;

  static Preset desk();
  static Preset paper();
  static Preset by_name(const std::string& name);
};

struct GreenhouseSource {
  std::string name;
  std::optional<std::filesystem::path> csv;  // ingest instead of generating
  GreenhouseParams params;
  std::size_t days = 0;
};

struct ExperimentSpec {
  std::string preset = "desk";
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  std::vector<GreenhouseSource> greenhouses;
  ModelConfig model;
  MemoryConfig memory;
  std::size_t batch_size = 100;
  std::size_t replay_size = 100;
  std::size_t eval_every = 3;
  std::size_t test_size = 10000;
  std::size_t stride = 2;
  bool retention = false;
  bool dump_memory = false;
  std::array<FeatureBounds, kFeatureCount> bounds = Normalizer().bounds();

  // Where the greenhouse's CSV lives: its csv path, or <output_dir>/<name>.csv.
  std::filesystem::path dataset_path(const GreenhouseSource& g) const;
};

// Command-line values that take precedence over the spec file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::string> preset;
  std::optional<std::size_t> replay_size;
  std::optional<std::string> memory_strategy;
  bool retention = false;
  bool dump_memory = false;
};

// Preset defaults, then the document, then the overrides. Unknown keys and
// out-of-range values throw ValidationError naming the offending key.
ExperimentSpec parse_experiment(const nlohmann::json& doc, const Overrides& overrides = {});
ExperimentSpec load_experiment(const std::optional<std::filesystem::path>& path, const Overrides& overrides = {});

nlohmann::json greenhouse_params_json(const GreenhouseParams& p);

}  // namespace greenport::cli
