#pragma once

#include <cstdint>
#include <cstddef>
#include <string_view>

namespace srsm {

/// Deterministic, portable pseudo-random stream (splitmix64 core).
/// All randomness in the framework flows through named substreams of one
/// master seed so that parallelism and resume never change results.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (hand-rolled for cross-stdlib determinism).
  double normal();

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  /// Uniform index in [0, n). n must be > 0.
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

  bool coin() { return (next_u64() & 1u) != 0; }

private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Seed for the substream identified by (stream name, index) under a master seed.
std::uint64_t substream_seed(std::uint64_t master, std::string_view stream, std::uint64_t index = 0);

} // namespace srsm
