#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "greenport/data/window.hpp"
#include "greenport/memory/episodic_memory.hpp"
#include "greenport/model/lstm.hpp"
#include "greenport/numeric/rng.hpp"

namespace greenport {

class TrainerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One greenhouse: an ordered training stream and a held-out test set whose
// window end-timestamps never occur in the stream.
struct Phase {
  std::string label;
  std::vector<SamplePtr> stream;
  std::vector<SamplePtr> test_set;
};

// Windows the records, draws test_size windows at random as the test set and
// keeps the rest, in time order, as the training stream.
Phase build_phase(const std::string& label, std::span<const ClimateRecord> records, std::size_t window_len,
                  std::size_t stride, std::size_t test_size, Normalizer& normalizer, SeededRng& test_rng);

struct ScenarioConfig {
  std::vector<Phase> phases;
  std::size_t batch_size = 100;
  std::size_t replay_size = 100;
  std::size_t eval_every = 3;
  std::size_t test_size = 10000;
  std::uint64_t seed = 0;
  bool retention = false;     // also evaluate on every earlier phase's test set
  bool track_memory = false;  // record memory occupancy after every update
  ModelConfig model;
  MemoryConfig memory;

  void validate() const;
};

struct EvalPoint {
  std::size_t update_index = 0;
  std::size_t eval_index = 0;
  std::string phase;
  double mse_total = 0.0;
  double mse_transpiration = 0.0;
  double mse_photosynthesis = 0.0;
  friend bool operator==(const EvalPoint&, const EvalPoint&) = default;
};

struct PhaseStart {
  std::string phase;
  std::size_t start_update = 0;  // updates completed before the phase began
  friend bool operator==(const PhaseStart&, const PhaseStart&) = default;
};

struct LearningCurve {
  std::vector<EvalPoint> points;
  std::vector<PhaseStart> phases;

  // Update indices at which the training data switched greenhouse.
  std::vector<std::size_t> phase_boundaries() const;
  friend bool operator==(const LearningCurve&, const LearningCurve&) = default;
};

// Evaluation of the current model on an earlier phase's test set.
struct RetentionPoint {
  std::size_t update_index = 0;
  std::string training_phase;
  std::string test_phase;
  double mse_total = 0.0;
  double mse_transpiration = 0.0;
  double mse_photosynthesis = 0.0;
  friend bool operator==(const RetentionPoint&, const RetentionPoint&) = default;
};

struct MemoryShareRow {
  std::size_t update_index = 0;
  std::string label;
  double fraction = 0.0;
  friend bool operator==(const MemoryShareRow&, const MemoryShareRow&) = default;
};

struct TrainerState {
  ModelConfig model_config;
  ModelParams params;
  AdamState adam;
  EpisodicMemory memory;
  SeededRng memory_rng;
  SeededRng replay_rng;
  std::size_t update_index = 0;
};

// Root seed split into labelled streams: "init", "memory", "replay".
TrainerState fresh_state(const ScenarioConfig& cfg);

struct UpdateResult {
  double loss = 0.0;
  std::size_t minibatch_size = 0;
  double grad_norm = 0.0;
};

// Replay is drawn before the new batch enters memory; one gradient step on
// new_batch + min(replay_size, memory size) replayed samples.
UpdateResult train_update(TrainerState& state, std::span<const SamplePtr> new_batch, const ScenarioConfig& cfg);

struct EvalResult {
  double mse_total = 0.0;
  double mse_transpiration = 0.0;
  double mse_photosynthesis = 0.0;
};

EvalResult evaluate(const ModelParams& params, std::span<const SamplePtr> test_set);

struct RunLog {
  LearningCurve curve;
  std::vector<RetentionPoint> retention;
  std::vector<MemoryShareRow> memory_trace;
  std::vector<double> losses;  // training loss per update
};

// Consumes the stream in batch_size chunks (a trailing partial chunk is
// dropped) and evaluates on the phase's own test set whenever the global
// update index is a multiple of eval_every.
void run_phase(TrainerState& state, const Phase& phase, const ScenarioConfig& cfg, RunLog& log,
               std::span<const Phase> earlier_phases = {});

struct ScenarioResult {
  RunLog log;
  TrainerState state;
};

ScenarioResult run_scenario(const ScenarioConfig& cfg);

// Number of updates the full scenario performs before phase_index begins.
std::size_t phase_offset(const ScenarioConfig& cfg, std::size_t phase_index);

// Fresh model and empty memory trained on one phase only, with update
// indices offset so the curve overlays the full scenario's.
ScenarioResult run_baseline(const ScenarioConfig& cfg, std::size_t phase_index);

}  // namespace greenport
