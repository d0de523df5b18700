#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace l2b {

/// Named-stream seed derivation. Every random consumer in a run gets its own
/// stream derived from the single root seed:
///   derive_seed(root, "env", episode), derive_seed(root, "init"), ...
/// The mapping is a fixed function (FNV-1a over the name, splitmix64 mixing),
/// so it is stable across platforms and releases.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t index = 0);

std::uint64_t splitmix64(std::uint64_t x);

/// Seeded generator with platform-independent conversions (the standard
/// distributions are implementation-defined, the engine is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, n). n must be > 0.
  std::size_t uniform_index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace l2b
