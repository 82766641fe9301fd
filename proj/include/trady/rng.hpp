#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace trady {

// Seedable generator with a platform-stable output stream. The raw engine is
// std::mt19937_64 (bit-exact by the standard); all derived draws below avoid
// std::*_distribution, whose streams are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, n) by rejection, bias-free.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Uniform double in (0,1), never exactly 0 or 1.
  double next_open01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
  }

  // Uniform double in [0,1).
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }

  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Standard normal via Box-Muller (one value per call, no caching so the
  // stream stays a pure function of the draw count).
  double next_normal() {
    const double u = next_open01();
    const double v = next_open01();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
  }

  // Fisher-Yates over indices 0..n-1.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Derives an independent child seed; used to split one run seed into
  // per-purpose streams (init, shuffle, masks, noise) without overlap.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream_tag) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream_tag + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace trady
