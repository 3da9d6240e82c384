#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace socialtd {

// Portable random stream. The engine is fully specified by the standard; the
// helpers below avoid std::*_distribution, whose output differs between
// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform on [0, n) by rejection; n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// child = mix(master, label): FNV-1a over the label, folded into the master
// seed and finalized with mix64. Stable across platforms and runs.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

}  // namespace socialtd
