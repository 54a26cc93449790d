#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tuner {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Addressable random stream. Identical (seed, stream_id) pairs reproduce
/// identical draw sequences on every platform; child() derives independent
/// substreams so parallel tasks never share state.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  RngStream child(std::uint64_t key) const {
    return RngStream{seed, splitmix64(stream_id ^ splitmix64(key + 0x51ed270b4d2cb217ULL))};
  }
};

/// Draw helpers over std::mt19937_64 (engine output is fully specified by the
/// standard). Conversions to doubles are hand-rolled: std::*_distribution is
/// implementation-defined and would break bit-reproducibility across stdlibs.
class RngEngine {
 public:
  explicit RngEngine(const RngStream& s) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(s.seed), static_cast<std::uint32_t>(s.seed >> 32),
        static_cast<std::uint32_t>(s.stream_id), static_cast<std::uint32_t>(s.stream_id >> 32)};
    engine_.seed(seq);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), unbiased via rejection.
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return r % n;
    }
  }

  /// Standard normal via Box-Muller (first branch only, drawing two uniforms).
  double normal() {
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tuner
