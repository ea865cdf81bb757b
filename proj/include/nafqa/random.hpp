#pragma once

#include <cstdint>

namespace nafqa {

/// SplitMix64 (Steele, Lea, Flood). Eight bytes of state, so one generator per
/// trajectory is affordable at 10^5 trajectories.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state = 0) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Independent substream for (seed, stream index). Substreams of different
/// indices do not depend on how many streams exist.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 mixer(seed ^ 0x6a09e667f3bcc909ULL);
  std::uint64_t key = mixer();
  SplitMix64 mixer2(key + stream * 0xd1342543de82ef95ULL);
  return SplitMix64(mixer2());
}

}  // namespace nafqa
