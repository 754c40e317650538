#pragma once

// Keyed random streams: every (seed, purpose, index...) tuple maps to its own
// generator, so draws never depend on scheduling or thread count.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

#include "sklab/gaussian.hpp"

namespace sklab {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t stream_key(std::uint64_t seed,
                                          std::initializer_list<std::uint64_t> path) {
  std::uint64_t k = splitmix64(seed);
  for (std::uint64_t p : path) k = splitmix64(k ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return k;
}

/// Stream identifiers used across modules.
enum class Stream : std::uint64_t {
  Couplings = 1,
  SharedGaussian = 2,
  FirstCopy = 3,
  SecondCopy = 4,
  Metropolis = 5,
};

/// Standard normals by inversion of mt19937_64 uniforms. Both pieces are fully
/// specified, so streams are reproducible across platforms.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t key) : engine_(key) {}

  /// Uniform on (0, 1), 53-bit resolution.
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() { return std_normal_quantile(uniform()); }

  void fill(std::span<double> out) {
    for (double& v : out) v = normal();
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sklab
