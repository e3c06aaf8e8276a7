#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "greenport/data/window.hpp"
#include "greenport/numeric/rng.hpp"

namespace greenport {

class MemoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// How a full memory absorbs new samples.
//   PerElement: for each new sample, every slot is replaced by it with probability p.
//   PerSample:  for each new sample, with probability p it overwrites one random slot.
//   PerBatch:   once per batch, every slot is replaced with probability p by a
//               uniformly chosen member of the batch.
enum class MemoryStrategy { PerElement, PerSample, PerBatch };

std::string_view strategy_name(MemoryStrategy s) noexcept;  // per-element | per-sample | per-batch
MemoryStrategy parse_strategy(std::string_view name);

struct MemoryConfig {
  std::size_t capacity = 10000;
  double substitution_probability = 0.1;
  MemoryStrategy strategy = MemoryStrategy::PerBatch;

  void validate() const;
  friend bool operator==(const MemoryConfig&, const MemoryConfig&) = default;
};

struct OriginShare {
  std::string label;
  std::size_t count = 0;
  double fraction = 0.0;
  friend bool operator==(const OriginShare&, const OriginShare&) = default;
};

class EpisodicMemory {
 public:
  explicit EpisodicMemory(MemoryConfig cfg = {});

  const MemoryConfig& config() const noexcept { return cfg_; }
  std::size_t size() const noexcept { return slots_.size(); }
  std::size_t capacity() const noexcept { return cfg_.capacity; }
  bool empty() const noexcept { return slots_.empty(); }
  bool full() const noexcept { return slots_.size() == cfg_.capacity; }
  std::size_t observed_count() const noexcept { return observed_; }
  std::span<const SamplePtr> slots() const noexcept { return slots_; }
  // Samples observed one at a time under PerBatch after the fill phase,
  // waiting for end_batch().
  std::span<const SamplePtr> pending() const noexcept { return pending_; }

  void observe(SamplePtr sample, SeededRng& rng);
  void observe_batch(std::span<const SamplePtr> batch, SeededRng& rng);
  // Applies the PerBatch rule to buffered samples; no-op when nothing is pending.
  void end_batch(SeededRng& rng);

  // n independent uniform draws with replacement.
  std::vector<SamplePtr> draw_replay(std::size_t n, SeededRng& rng) const;

  // Sorted by label; counts sum to size().
  std::vector<OriginShare> occupancy_stats() const;

  static EpisodicMemory restore(MemoryConfig cfg, std::vector<SamplePtr> slots, std::vector<SamplePtr> pending,
                                std::size_t observed_count);

 private:
  void substitute_batch(std::span<const SamplePtr> batch, SeededRng& rng);

  MemoryConfig cfg_;
  std::vector<SamplePtr> slots_;
  std::vector<SamplePtr> pending_;
  std::size_t observed_ = 0;
};

}  // namespace greenport
