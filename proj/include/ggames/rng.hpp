#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ggames::rng {

// Counter-based generator: every draw is a pure function of its key, so
// results do not depend on evaluation order or thread scheduling.
constexpr std::uint64_t mix(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t key(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                            std::uint64_t c = 0, std::uint64_t d = 0) noexcept {
  std::uint64_t h = mix(seed);
  h = mix(h ^ a);
  h = mix(h ^ (b + 0x632be59bd9b4e019ULL));
  h = mix(h ^ (c + 0x8cb92ba72f3d8dd7ULL));
  return mix(h ^ (d + 0x1d8e4e27c47d124fULL));
}

// Uniform on [0, 1) with 53 random bits.
constexpr double uniform(std::uint64_t k) noexcept {
  return static_cast<double>(k >> 11) * 0x1.0p-53;
}

// Standard normal by Box-Muller from two keyed uniforms.
inline double normal(std::uint64_t k) noexcept {
  const double u1 = 1.0 - uniform(mix(k ^ 0x5851f42d4c957f2dULL));
  const double u2 = uniform(mix(k ^ 0x14057b7ef767814fULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Small sequential generator for restarts and random test instances.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(mix(seed)) {}
  std::uint64_t next() noexcept { return mix(state_++); }
  double uniform() noexcept { return rng::uniform(next()); }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  double normal() noexcept { return rng::normal(next()); }
  int integer(int lo, int hi) noexcept {  // inclusive bounds
    return lo + static_cast<int>(uniform() * (hi - lo + 1));
  }

 private:
  std::uint64_t state_;
};

}  // namespace ggames::rng
