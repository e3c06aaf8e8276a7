#include "greenport/numeric/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace greenport {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

SeededRng::State seed_state(std::uint64_t seed) noexcept {
  std::uint64_t x = seed;
  SeededRng::State s{};
  for (auto& w : s) w = splitmix64(x);
  return s;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& x) noexcept {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

SeededRng::SeededRng(std::uint64_t seed) : seed_(seed), state_(seed_state(seed)) {}

SeededRng SeededRng::restore(std::uint64_t seed, const State& state) {
  if (state == State{}) throw std::invalid_argument("xoshiro256** state must not be all zero");
  SeededRng r(seed);
  r.state_ = state;
  return r;
}

std::uint64_t SeededRng::next_u64() noexcept {
  auto& s = state_;
  const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
  const std::uint64_t t = s[1] << 17;
  s[2] ^= s[0];
  s[3] ^= s[1];
  s[1] ^= s[2];
  s[0] ^= s[3];
  s[2] ^= t;
  s[3] = rotl(s[3], 45);
  return result;
}

double SeededRng::uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double SeededRng::uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

std::uint64_t SeededRng::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be >= 1");
  // Rejection on the top of the range keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % n;
}

bool SeededRng::bernoulli(double p) noexcept { return uniform() < p; }

double SeededRng::normal() noexcept {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

SeededRng SeededRng::split(std::string_view label) const {
  std::uint64_t x = seed_ ^ fnv1a64(label);
  return SeededRng(splitmix64(x));
}

}  // namespace greenport
