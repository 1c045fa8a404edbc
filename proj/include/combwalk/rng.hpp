#pragma once

#include <array>
#include <bit>
#include <cstdint>

namespace combwalk {

/// SplitMix64 finalizer (Stafford variant 13). A bijection on 64-bit words.
constexpr uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives the seed of replica `index` from a master seed.
///
/// For a fixed master seed the map index -> seed is injective (an odd-stride
/// Weyl step followed by a bijective mixer), so replica seeds never collide.
uint64_t split_seed(uint64_t master_seed, uint64_t index);

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<uint32_t, 4> philox4x32_10(std::array<uint32_t, 4> counter,
                                      std::array<uint32_t, 2> key);

/// Counter-based random stream keyed by a 64-bit seed.
///
/// Output block i is philox4x32_10({i_lo, i_hi, 0, 0}, key(seed)), so the
/// sequence depends only on the seed and is identical on every platform.
/// Bit-level draws (bit, two_bits, geometric_half) are served from a separate
/// 64-bit buffer so that lattice steps consume exactly the entropy they need.
class RngStream {
 public:
  explicit RngStream(uint64_t seed);

  uint64_t seed() const { return seed_; }

  /// Independent child stream; children with distinct k never share a key.
  RngStream substream(uint64_t k) const { return RngStream(split_seed(seed_, k)); }

  uint64_t next_u64() {
    if (block_pos_ == 2) refill_block();
    return block_[block_pos_++];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal variate (Marsaglia polar method).
  double normal();

  bool bit() {
    if (bits_left_ == 0) refill_bits();
    const bool b = (word_ & 1U) != 0;
    word_ >>= 1;
    --bits_left_;
    return b;
  }

  /// Uniform on {0, 1, 2, 3}.
  unsigned two_bits() {
    if (bits_left_ < 2) refill_bits();
    const auto r = static_cast<unsigned>(word_ & 3U);
    word_ >>= 2;
    bits_left_ -= 2;
    return r;
  }

  /// Geometric on {0, 1, 2, ...} with P(k) = 2^{-(k+1)}: the number of
  /// consecutive 1-bits before the first 0-bit.
  int64_t geometric_half() {
    int64_t k = 0;
    for (;;) {
      if (bits_left_ == 0) refill_bits();
      const int ones = std::countr_one(word_);
      if (ones < bits_left_) {
        k += ones;
        consume(ones + 1);
        return k;
      }
      k += bits_left_;
      bits_left_ = 0;
    }
  }

 private:
  void refill_block();
  void refill_bits() {
    word_ = next_u64();
    bits_left_ = 64;
  }
  void consume(int n) {
    word_ = n >= 64 ? 0 : word_ >> n;
    bits_left_ -= n;
  }

  uint64_t seed_;
  std::array<uint32_t, 2> key_;
  uint64_t counter_ = 0;
  std::array<uint64_t, 2> block_{};
  int block_pos_ = 2;
  uint64_t word_ = 0;
  int bits_left_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace combwalk
