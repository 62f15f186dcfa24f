#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace vpc {

/// Malformed or inconsistent input data (bad trace rows, degenerate
/// estimator input, unusable sample sets). CLI exit code 3.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid configuration detected before any work starts. CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Seeded random source. All draws go through explicit arithmetic on the
/// mt19937_64 stream; std::uniform_* distributions are implementation-defined
/// and would break cross-toolchain reproducibility of seeded runs.
class Rng {
public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n); n must be positive.
  uint64_t below(uint64_t n);

  /// Index drawn proportionally to non-negative weights. Total weight must
  /// be positive.
  std::size_t weighted_pick(std::span<const double> weights);

  /// In-place Fisher-Yates shuffle.
  void shuffle(std::vector<int>& items);

private:
  std::mt19937_64 engine_;
};

}  // namespace vpc
