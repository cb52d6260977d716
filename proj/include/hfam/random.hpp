#pragma once

#include <cstdint>

namespace hfam {

/// SplitMix64 (Steele, Lea, Flood 2014). Used both as the per-sample
/// generator and as the seed mixer; its output sequence is fully specified
/// so graphs are reproducible across platforms and compilers.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Unbiased integer in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept {
    // Lemire's multiply-shift with rejection.
    std::uint64_t x = (*this)();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        x = (*this)();
        m = static_cast<__uint128_t>(x) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// True with probability exactly num/den.
  bool bernoulli(std::uint64_t num, std::uint64_t den) noexcept {
    return below(den) < num;
  }

 private:
  std::uint64_t state_;
};

/// Subseed for item `index` of a stream seeded by `seed`. Two rounds of the
/// SplitMix64 finalizer over (seed, index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  SplitMix64 a(seed);
  const std::uint64_t s = a();
  SplitMix64 b(s ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
  return b();
}

}  // namespace hfam
