#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "greenport/data/window.hpp"
#include "greenport/numeric/rng.hpp"

namespace greenport::testing {

// Random normalized window with a label/timestamp origin.
inline SamplePtr random_sample(SeededRng& rng, std::size_t window_len, const std::string& label = "T",
                               std::int64_t ts = 0) {
  auto s = std::make_shared<WindowedSample>();
  s->inputs = Matrix(window_len, kInputCount);
  for (double& v : s->inputs.values()) v = rng.uniform();
  for (double& v : s->targets) v = rng.uniform();
  s->origin = {label, ts};
  return s;
}

inline std::vector<SamplePtr> random_samples(SeededRng& rng, std::size_t n, std::size_t window_len,
                                             const std::string& label = "T", std::int64_t first_ts = 0) {
  std::vector<SamplePtr> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_sample(rng, window_len, label, first_ts + std::int64_t(i)));
  return out;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("greenport_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace greenport::testing
