#pragma once

#include <cstdint>
#include <cmath>

namespace ldp {

/// Splittable counter-style generator. A stream is fully determined by
/// (seed, stream index), so workers can derive their substreams without
/// coordination and results do not depend on scheduling.
///
/// The state update is the splitmix64 sequence; distinct streams start at
/// well separated points of the orbit via a double mix of seed and index.
class SplitRng {
public:
  SplitRng(uint64_t seed, uint64_t stream = 0) {
    state_ = mix(mix(seed + 0x9E3779B97F4A7C15ULL) ^ mix(stream + 0xD1B54A32D192ED03ULL));
  }

  uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double next_double_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Exp(1).
  double next_exponential() { return -std::log(next_double_pos()); }

  /// Standard normal (Box-Muller, second value cached).
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = next_double_pos();
    double v = next_double();
    double r = std::sqrt(-2.0 * std::log(u));
    double c = std::cos(6.283185307179586476925286766559 * v);
    double s = std::sin(6.283185307179586476925286766559 * v);
    spare_ = r * s;
    has_spare_ = true;
    return r * c;
  }

  /// Poisson(mean), exact for any mean >= 0.
  uint64_t next_poisson(double mean);

private:
  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ldp
