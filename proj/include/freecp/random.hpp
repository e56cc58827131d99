#pragma once

// Counter-based random streams. Philox4x32-10 keyed by the master seed, with
// the stream index in the upper half of the counter: stream j never has to be
// drained to reach stream j+1. Normals use the basic Box-Muller transform, both
// outputs consumed in order. This layout is frozen; seeded tests depend on it.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace freecp {

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

/// SplitMix64 finaliser; used to derive child master seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Deterministic child seed for a (tag, a, b) coordinate under `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t a = 0,
                                    std::uint64_t b = 0) noexcept {
  std::uint64_t h = mix64(master ^ 0x6A09E667F3BCC908ULL);
  h = mix64(h ^ tag);
  h = mix64(h ^ a);
  return mix64(h ^ b);
}

/// Philox4x32 with 10 rounds.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Block generate(Block ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

/// Sequential view of one (master_seed, stream_index) stream.
class RandomStream {
 public:
  explicit RandomStream(SeedSpec seed) : seed_(seed) {}

  std::uint32_t next_u32() {
    if (lane_ == 4) refill();
    return block_[lane_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  /// Uniform on the open interval (0, 1).
  double next_uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
  }

  SeedSpec seed() const noexcept { return seed_; }

 private:
  void refill() {
    const Philox4x32::Block ctr{static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                                static_cast<std::uint32_t>(seed_.stream_index),
                                static_cast<std::uint32_t>(seed_.stream_index >> 32)};
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed_.master_seed),
                              static_cast<std::uint32_t>(seed_.master_seed >> 32)};
    block_ = Philox4x32::generate(ctr, key);
    ++counter_;
    lane_ = 0;
  }

  SeedSpec seed_;
  std::uint64_t counter_ = 0;
  Philox4x32::Block block_{};
  int lane_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace freecp
