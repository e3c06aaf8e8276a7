#include "greenport/trainer/trainer.hpp"

#include <algorithm>
#include <numeric>

namespace greenport {

std::vector<std::size_t> LearningCurve::phase_boundaries() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < phases.size(); ++i) out.push_back(phases[i].start_update);
  return out;
}

Phase build_phase(const std::string& label, std::span<const ClimateRecord> records, std::size_t window_len,
                  std::size_t stride, std::size_t test_size, Normalizer& normalizer, SeededRng& test_rng) {
  const auto windows = extract_windows(records, window_len, stride);
  if (test_size >= windows.size()) {
    throw TrainerError("phase '" + label + "': test_size " + std::to_string(test_size) + " leaves no training data (" +
                       std::to_string(windows.size()) + " windows)");
  }
  auto samples = make_samples(records, windows, normalizer, label);

  // Partial Fisher-Yates over window indices picks the test subset.
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < test_size; ++i) {
    const std::size_t j = i + test_rng.uniform_index(order.size() - i);
    std::swap(order[i], order[j]);
  }
  std::vector<bool> is_test(samples.size(), false);
  for (std::size_t i = 0; i < test_size; ++i) is_test[order[i]] = true;

  Phase phase;
  phase.label = label;
  phase.test_set.reserve(test_size);
  phase.stream.reserve(samples.size() - test_size);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    (is_test[i] ? phase.test_set : phase.stream).push_back(std::move(samples[i]));
  }
  return phase;
}

void ScenarioConfig::validate() const {
  if (batch_size < 1) throw TrainerError("batch_size must be >= 1");
  if (eval_every < 1) throw TrainerError("eval_every must be >= 1");
  model.validate();
  memory.validate();
}

TrainerState fresh_state(const ScenarioConfig& cfg) {
  cfg.validate();
  const SeededRng root(cfg.seed);
  SeededRng init_rng = root.split("init");
  return TrainerState{cfg.model,
                      init_model(cfg.model, init_rng),
                      AdamState::zeros(cfg.model),
                      EpisodicMemory(cfg.memory),
                      root.split("memory"),
                      root.split("replay"),
                      0};
}

UpdateResult train_update(TrainerState& state, std::span<const SamplePtr> new_batch, const ScenarioConfig& cfg) {
  if (new_batch.empty()) throw TrainerError("train_update: empty batch");

  std::vector<SamplePtr> minibatch(new_batch.begin(), new_batch.end());
  if (!state.memory.empty() && cfg.replay_size > 0) {
    const std::size_t n = std::min(cfg.replay_size, state.memory.size());
    const auto replay = state.memory.draw_replay(n, state.replay_rng);
    minibatch.insert(minibatch.end(), replay.begin(), replay.end());
  }

  auto [loss, grads] = backward(state.params, minibatch);
  const double norm = clip_gradients(grads, cfg.model.clip_norm);
  adam_step(state.params, grads, state.adam, cfg.model);
  state.memory.observe_batch(new_batch, state.memory_rng);
  ++state.update_index;
  return {loss, minibatch.size(), norm};
}

EvalResult evaluate(const ModelParams& params, std::span<const SamplePtr> test_set) {
  if (test_set.empty()) throw TrainerError("evaluate: empty test set");
  const auto mse = mse_loss(predict_batch(params, test_set), target_matrix(test_set));
  return {mse.total, mse.per_output.at(0), mse.per_output.at(1)};
}

void run_phase(TrainerState& state, const Phase& phase, const ScenarioConfig& cfg, RunLog& log,
               std::span<const Phase> earlier_phases) {
  log.curve.phases.push_back({phase.label, state.update_index});
  const std::size_t updates = phase.stream.size() / cfg.batch_size;
  const std::span<const SamplePtr> stream(phase.stream);

  for (std::size_t u = 0; u < updates; ++u) {
    const auto result = train_update(state, stream.subspan(u * cfg.batch_size, cfg.batch_size), cfg);
    log.losses.push_back(result.loss);

    if (cfg.track_memory) {
      for (const auto& share : state.memory.occupancy_stats()) {
        log.memory_trace.push_back({state.update_index, share.label, share.fraction});
      }
    }

    if (state.update_index % cfg.eval_every != 0) continue;
    const auto e = evaluate(state.params, phase.test_set);
    log.curve.points.push_back({state.update_index, state.update_index / cfg.eval_every, phase.label, e.mse_total,
                                e.mse_transpiration, e.mse_photosynthesis});
    if (cfg.retention) {
      for (const auto& old : earlier_phases) {
        const auto r = evaluate(state.params, old.test_set);
        log.retention.push_back(
            {state.update_index, phase.label, old.label, r.mse_total, r.mse_transpiration, r.mse_photosynthesis});
      }
    }
  }
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  if (cfg.phases.empty()) throw TrainerError("run_scenario: no phases");
  ScenarioResult result{RunLog{}, fresh_state(cfg)};
  const std::span<const Phase> phases(cfg.phases);
  for (std::size_t i = 0; i < phases.size(); ++i) {
    run_phase(result.state, phases[i], cfg, result.log, phases.first(i));
  }
  return result;
}

std::size_t phase_offset(const ScenarioConfig& cfg, std::size_t phase_index) {
  if (phase_index >= cfg.phases.size()) throw TrainerError("phase index out of range");
  std::size_t offset = 0;
  for (std::size_t i = 0; i < phase_index; ++i) offset += cfg.phases[i].stream.size() / cfg.batch_size;
  return offset;
}

ScenarioResult run_baseline(const ScenarioConfig& cfg, std::size_t phase_index) {
  const std::size_t offset = phase_offset(cfg, phase_index);
  const Phase& phase = cfg.phases[phase_index];
  if (phase.stream.size() < cfg.batch_size) {
    throw TrainerError("baseline phase '" + phase.label + "' has fewer samples than one batch");
  }
  ScenarioResult result{RunLog{}, fresh_state(cfg)};
  result.state.update_index = offset;
  run_phase(result.state, phase, cfg, result.log);
  return result;
}

}  // namespace greenport
