#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace synstdp {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Pure: the same (counter, key) always yields the same
/// four words.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

/// Counter-based random stream. Satisfies UniformRandomBitGenerator with
/// 64-bit output. Stream identity is (seed, stream_hi, stream_lo); the last
/// counter word walks through blocks.
class PhiloxStream {
 public:
  using result_type = std::uint64_t;

  PhiloxStream(std::uint64_t seed, std::uint32_t stream_hi, std::uint32_t stream_lo)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        hi_(stream_hi),
        lo_(stream_lo) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (used_ == 2) refill();
    const auto i = 2 * used_++;
    return (std::uint64_t{buf_[i]} << 32) | buf_[i + 1];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  void refill() {
    buf_ = philox4x32({block_lo_, block_hi_, lo_, hi_}, key_);
    if (++block_lo_ == 0) ++block_hi_;
    used_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint32_t hi_;
  std::uint32_t lo_;
  std::uint32_t block_lo_ = 0;
  std::uint32_t block_hi_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int used_ = 2;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Independent reproducible stream for one (grid point, epoch) trial.
inline PhiloxStream rng_substream(std::uint64_t seed, std::uint32_t point_index,
                                  std::uint32_t epoch_index) {
  return PhiloxStream(seed, point_index, epoch_index);
}

}  // namespace synstdp
