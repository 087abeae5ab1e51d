#pragma once

#include <cstdint>
#include <random>

namespace superlap {

// Portable uniform draws on top of mt19937_64; std::uniform_real_distribution
// is implementation-defined and would break cross-platform reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller.
  double normal();
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Derives a child seed from a parent seed and a stream tag.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace superlap
