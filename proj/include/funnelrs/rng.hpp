#ifndef FUNNELRS_RNG_HPP
#define FUNNELRS_RNG_HPP

#include <cmath>
#include <cstdint>

namespace funnelrs {

/// SplitMix64 (Steele, Lea & Flood 2014). Chosen over std::mt19937_64
/// because the uniform/normal draw path below is fully pinned down, so
/// identical seeds give identical streams on every platform and compiler.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (cosine branch only; two uniforms
  /// per variate, no cached spare, so the stream position is unambiguous).
  double next_gaussian() {
    double u1;
    do {
      u1 = next_double();
    } while (u1 <= 0.0);
    const double u2 = next_double();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

 private:
  std::uint64_t state_;
};

/// Stream derivation contract: task i of a batch seeded with `base` uses
/// SplitMix64(base + i). The generator's output function scrambles the
/// counter-like state, so adjacent seeds give independent-looking streams.
inline SplitMix64 derived_stream(std::uint64_t base, std::uint64_t index) {
  return SplitMix64(base + index);
}

}  // namespace funnelrs

#endif
