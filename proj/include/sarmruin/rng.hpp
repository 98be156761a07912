#pragma once

#include <cstdint>
#include <random>

namespace sarmruin {

/// SplitMix64 finalizer; used only to derive substream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent pseudorandom stream keyed by (seed, stream index).
///
/// Every parallel unit of work (a sampling block, an estimator batch, a
/// per-i summability run) owns one of these, so output never depends on
/// which worker ran it.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t a = mix64(seed);
    const std::uint64_t b = mix64(a ^ mix64(index + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    engine_.seed(seq);
  }

  /// Uniform draw on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t bits() noexcept { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 generator for one simulated path. Seeded from a Stream, it
/// lets every path consume exactly one draw of its batch stream however many
/// steps it runs, so estimators at different horizons share random numbers.
class PathRng {
 public:
  explicit PathRng(std::uint64_t state) noexcept : state_(state) {}

  double uniform() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

}  // namespace sarmruin
