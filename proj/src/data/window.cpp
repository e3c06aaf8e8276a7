#include "greenport/data/window.hpp"

#include <algorithm>

namespace greenport {

namespace {

constexpr std::array<FeatureBounds, kFeatureCount> kDefaultBounds{{
    {0.0, 50.0},    // t_air
    {0.0, 100.0},   // rh
    {0.0, 1200.0},  // radiation
    {0.0, 2000.0},  // co2
    {0.0, 50.0},    // t_leaf
    {0.0, 5.0},     // transpiration
    {0.0, 50.0},    // photosynthesis
}};

}  // namespace

Normalizer::Normalizer() : Normalizer(kDefaultBounds) {}

Normalizer::Normalizer(const std::array<FeatureBounds, kFeatureCount>& bounds) : bounds_(bounds) {
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    if (!(bounds_[f].max > bounds_[f].min)) {
      throw DataError("normalizer: max must exceed min for feature " + std::to_string(f));
    }
  }
}

double Normalizer::normalize(std::size_t feature, double x) {
  const auto& b = bounds_.at(feature);
  const double v = (x - b.min) / (b.max - b.min);
  if (v < 0.0 || v > 1.0) {
    ++clamp_count_;
    return std::clamp(v, 0.0, 1.0);
  }
  return v;
}

double Normalizer::denormalize(std::size_t feature, double v) const {
  const auto& b = bounds_.at(feature);
  return b.min + v * (b.max - b.min);
}

std::vector<WindowSpan> extract_windows(std::size_t record_count, std::size_t window_len, std::size_t stride) {
  if (window_len < 1 || stride < 1) throw DataError("extract_windows: window_len and stride must be >= 1");
  std::vector<WindowSpan> out;
  if (record_count < window_len) return out;
  out.reserve((record_count - window_len) / stride + 1);
  for (std::size_t first = 0; first + window_len <= record_count; first += stride) {
    out.push_back({first, window_len});
  }
  return out;
}

std::vector<WindowSpan> extract_windows(std::span<const ClimateRecord> records, std::size_t window_len,
                                        std::size_t stride) {
  return extract_windows(records.size(), window_len, stride);
}

std::vector<SamplePtr> make_samples(std::span<const ClimateRecord> records, std::span<const WindowSpan> windows,
                                    Normalizer& normalizer, const std::string& label) {
  // Normalize each record once; windows overlap heavily.
  std::vector<std::array<double, kFeatureCount>> normed(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto in = records[i].inputs();
    const auto tg = records[i].targets();
    for (std::size_t f = 0; f < kInputCount; ++f) normed[i][f] = normalizer.normalize(f, in[f]);
    for (std::size_t f = 0; f < kTargetCount; ++f) normed[i][kInputCount + f] = normalizer.normalize(kInputCount + f, tg[f]);
  }

  std::vector<SamplePtr> out;
  out.reserve(windows.size());
  for (const auto& w : windows) {
    if (w.length == 0 || w.first + w.length > records.size()) throw DataError("make_samples: window out of range");
    auto s = std::make_shared<WindowedSample>();
    s->inputs = Matrix(w.length, kInputCount);
    for (std::size_t t = 0; t < w.length; ++t) {
      std::copy_n(normed[w.first + t].begin(), kInputCount, s->inputs.row(t).begin());
    }
    const auto& last = normed[w.last()];
    s->targets = {last[kInputCount], last[kInputCount + 1]};
    s->origin = {label, records[w.last()].timestamp};
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace greenport
