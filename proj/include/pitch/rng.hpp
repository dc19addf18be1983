#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>

namespace pitch {

/// Seeded generator with draws defined in terms of raw std::mt19937_64
/// output only, so results replay identically on every standard library
/// (the std distributions are implementation-defined).
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound) by rejection sampling.
  std::uint64_t uniform_index(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t raw = engine_();
    while (raw >= limit) raw = engine_();
    return raw % bound;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (one value per call, no caching).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::string hex_token(int bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(static_cast<std::size_t>(bytes) * 2);
    std::uint64_t word = 0;
    for (int i = 0; i < bytes; ++i) {
      if (i % 8 == 0) word = engine_();
      const auto byte = static_cast<unsigned>(word & 0xffU);
      word >>= 8;
      out.push_back(kDigits[byte >> 4]);
      out.push_back(kDigits[byte & 0xfU]);
    }
    return out;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pitch
