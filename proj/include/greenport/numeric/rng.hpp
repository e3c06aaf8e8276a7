#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace greenport {

// xoshiro256** (Blackman & Vigna, 2018) seeded through SplitMix64.
//
//   seeding:  s[k] = splitmix64(x) for k = 0..3, x advancing by 0x9E3779B97F4A7C15
//   next():   r = rotl(s1 * 5, 7) * 9; t = s1 << 17;
//             s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45)
//
// Doubles take the top 53 bits. Normals use Box-Muller with no cached second
// value so the consumed-word count is fixed per call. split(label) derives a
// child from (seed, label) only, never from the current position.
class SeededRng {
 public:
  using State = std::array<std::uint64_t, 4>;

  explicit SeededRng(std::uint64_t seed = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  const State& state() const noexcept { return state_; }
  static SeededRng restore(std::uint64_t seed, const State& state);

  std::uint64_t next_u64() noexcept;
  double uniform() noexcept;                     // [0, 1)
  double uniform(double lo, double hi) noexcept; // [lo, hi)
  std::uint64_t uniform_index(std::uint64_t n);  // [0, n), unbiased; n >= 1
  bool bernoulli(double p) noexcept;
  double normal() noexcept;
  double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

  SeededRng split(std::string_view label) const;

  friend bool operator==(const SeededRng&, const SeededRng&) = default;

 private:
  std::uint64_t seed_;
  State state_;
};

std::uint64_t splitmix64(std::uint64_t& x) noexcept;
std::uint64_t fnv1a64(std::string_view text) noexcept;

}  // namespace greenport
