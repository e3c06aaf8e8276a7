#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "greenport/data/climate.hpp"
#include "greenport/numeric/matrix.hpp"

namespace greenport {

inline constexpr std::size_t kFeatureCount = kInputCount + kTargetCount;

struct FeatureBounds {
  double min = 0.0;
  double max = 1.0;
  friend bool operator==(const FeatureBounds&, const FeatureBounds&) = default;
};

// Fixed physical bounds, feature order: t_air, rh, radiation, co2, t_leaf,
// transpiration, photosynthesis. Out-of-range values clamp to [0, 1] and
// bump the clamp counter.
class Normalizer {
 public:
  Normalizer();  // default physical ranges
  explicit Normalizer(const std::array<FeatureBounds, kFeatureCount>& bounds);

  const std::array<FeatureBounds, kFeatureCount>& bounds() const noexcept { return bounds_; }

  double normalize(std::size_t feature, double x);
  double denormalize(std::size_t feature, double v) const;

  std::size_t clamp_count() const noexcept { return clamp_count_; }
  void reset_clamp_count() noexcept { clamp_count_ = 0; }

 private:
  std::array<FeatureBounds, kFeatureCount> bounds_;
  std::size_t clamp_count_ = 0;
};

struct SampleOrigin {
  std::string label;
  std::int64_t end_timestamp = 0;
  friend bool operator==(const SampleOrigin&, const SampleOrigin&) = default;
};

struct WindowedSample {
  Matrix inputs;  // window_len x kInputCount, normalized
  std::array<double, kTargetCount> targets{};
  SampleOrigin origin;
  friend bool operator==(const WindowedSample&, const WindowedSample&) = default;
};

using SamplePtr = std::shared_ptr<const WindowedSample>;

// Records [first, first + length); the target is taken from the last one.
struct WindowSpan {
  std::size_t first = 0;
  std::size_t length = 0;
  std::size_t last() const noexcept { return first + length - 1; }
  friend bool operator==(const WindowSpan&, const WindowSpan&) = default;
};

// floor((n - window_len) / stride) + 1 windows when n >= window_len, else none.
std::vector<WindowSpan> extract_windows(std::size_t record_count, std::size_t window_len, std::size_t stride);
std::vector<WindowSpan> extract_windows(std::span<const ClimateRecord> records, std::size_t window_len,
                                        std::size_t stride);

std::vector<SamplePtr> make_samples(std::span<const ClimateRecord> records, std::span<const WindowSpan> windows,
                                    Normalizer& normalizer, const std::string& label);

}  // namespace greenport
