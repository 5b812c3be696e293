#pragma once

// Deterministic random streams for record synthesis. The engine is the
// standardized mt19937_64; uniform/normal/exponential variates are generated
// explicitly (no std::*_distribution, whose output is implementation-defined)
// so batches are byte-identical across platforms and reruns.

#include <cmath>
#include <cstdint>
#include <random>

namespace xkerr {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class RandomStream {
 public:
  // Substream `index` of master seed `seed`: records draw independent streams.
  RandomStream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0xD1B54A32D192ED03ULL * (index + 1));
    engine_.seed(splitmix64(s));
  }

  // Uniform in (0, 1]: never returns 0, safe for log().
  double uniform() {
    const std::uint64_t bits = engine_() >> 11;  // 53 random bits
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (explicit, platform-stable).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

  // Exponential waiting time with linear rate `rate_per_ns`; +inf at rate 0.
  double exponential(double rate_per_ns) {
    if (rate_per_ns <= 0.0) return std::numeric_limits<double>::infinity();
    return -std::log(uniform()) / rate_per_ns;
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace xkerr
