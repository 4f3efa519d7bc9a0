#pragma once

#include <cstdint>
#include <random>

namespace cylkms {

/// Seeded RNG with explicit mappings to doubles and integer ranges.
///
/// std::mt19937_64 is bit-exact across platforms; the distribution mappings
/// below avoid std::uniform_real_distribution, whose output is
/// implementation-specified, so that seeded runs reproduce byte-identical
/// artifacts everywhere.
class SeededRng {
public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [lo, hi] via rejection-free modulo on a wide draw.
  /// Bias is < 2^-32 for the small ranges used here.
  long uniform_int(long lo, long hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<long>(engine_() % span);
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace cylkms
