#include "greenport/memory/episodic_memory.hpp"

#include <map>

namespace greenport {

std::string_view strategy_name(MemoryStrategy s) noexcept {
  switch (s) {
    case MemoryStrategy::PerElement: return "per-element";
    case MemoryStrategy::PerSample: return "per-sample";
    case MemoryStrategy::PerBatch: return "per-batch";
  }
  return "per-batch";
}

MemoryStrategy parse_strategy(std::string_view name) {
  if (name == "per-element") return MemoryStrategy::PerElement;
  if (name == "per-sample") return MemoryStrategy::PerSample;
  if (name == "per-batch") return MemoryStrategy::PerBatch;
  throw MemoryError("unknown memory strategy '" + std::string(name) + "'");
}

void MemoryConfig::validate() const {
  if (capacity < 1) throw MemoryError("memory capacity must be >= 1");
  if (!(substitution_probability >= 0.0 && substitution_probability <= 1.0)) {
    throw MemoryError("substitution probability must be in [0, 1]");
  }
}

EpisodicMemory::EpisodicMemory(MemoryConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  slots_.reserve(cfg_.capacity);
}

void EpisodicMemory::observe(SamplePtr sample, SeededRng& rng) {
  if (!sample) throw MemoryError("observe: null sample");
  ++observed_;
  if (!full()) {
    slots_.push_back(std::move(sample));
    return;
  }
  const double p = cfg_.substitution_probability;
  switch (cfg_.strategy) {
    case MemoryStrategy::PerElement:
      for (auto& slot : slots_) {
        if (rng.bernoulli(p)) slot = sample;
      }
      break;
    case MemoryStrategy::PerSample:
      if (rng.bernoulli(p)) slots_[rng.uniform_index(slots_.size())] = std::move(sample);
      break;
    case MemoryStrategy::PerBatch:
      pending_.push_back(std::move(sample));
      break;
  }
}

void EpisodicMemory::observe_batch(std::span<const SamplePtr> batch, SeededRng& rng) {
  if (batch.empty()) throw MemoryError("observe_batch: empty batch");
  if (cfg_.strategy != MemoryStrategy::PerBatch) {
    for (const auto& s : batch) observe(s, rng);
    return;
  }
  end_batch(rng);
  std::size_t i = 0;
  for (; i < batch.size() && !full(); ++i) {
    if (!batch[i]) throw MemoryError("observe_batch: null sample");
    slots_.push_back(batch[i]);
    ++observed_;
  }
  const auto rest = batch.subspan(i);
  if (rest.empty()) return;
  for (const auto& s : rest) {
    if (!s) throw MemoryError("observe_batch: null sample");
  }
  observed_ += rest.size();
  substitute_batch(rest, rng);
}

void EpisodicMemory::end_batch(SeededRng& rng) {
  if (pending_.empty()) return;
  std::vector<SamplePtr> batch;
  batch.swap(pending_);
  substitute_batch(batch, rng);
}

void EpisodicMemory::substitute_batch(std::span<const SamplePtr> batch, SeededRng& rng) {
  const double p = cfg_.substitution_probability;
  for (auto& slot : slots_) {
    if (rng.bernoulli(p)) slot = batch[rng.uniform_index(batch.size())];
  }
}

std::vector<SamplePtr> EpisodicMemory::draw_replay(std::size_t n, SeededRng& rng) const {
  if (n > 0 && slots_.empty()) throw MemoryError("draw_replay: memory is empty");
  std::vector<SamplePtr> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back(slots_[rng.uniform_index(slots_.size())]);
  return out;
}

std::vector<OriginShare> EpisodicMemory::occupancy_stats() const {
  std::map<std::string, std::size_t> counts;
  for (const auto& s : slots_) ++counts[s->origin.label];
  std::vector<OriginShare> out;
  out.reserve(counts.size());
  for (const auto& [label, count] : counts) {
    out.push_back({label, count, static_cast<double>(count) / static_cast<double>(slots_.size())});
  }
  return out;
}

EpisodicMemory EpisodicMemory::restore(MemoryConfig cfg, std::vector<SamplePtr> slots, std::vector<SamplePtr> pending,
                                       std::size_t observed_count) {
  EpisodicMemory m(cfg);
  if (slots.size() > cfg.capacity) throw MemoryError("restore: more slots than capacity");
  if (observed_count < slots.size()) throw MemoryError("restore: observed count below slot count");
  m.slots_ = std::move(slots);
  m.pending_ = std::move(pending);
  m.observed_ = observed_count;
  return m;
}

}  // namespace greenport
