#include "combwalk/rng.hpp"

#include <cmath>

namespace combwalk {

namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53U;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57U;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9U;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85U;

// MurmurHash3 fmix64; applied after mix64 so that replica seeds do not sit on
// the same SplitMix64 Weyl sequence as the master.
constexpr uint64_t fmix64(uint64_t k) {
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdULL;
  k ^= k >> 33;
  k *= 0xc4ceb9fe1a85ec53ULL;
  k ^= k >> 33;
  return k;
}

}  // namespace

uint64_t split_seed(uint64_t master_seed, uint64_t index) {
  return fmix64(mix64(master_seed) + (index + 1) * 0xD1B54A32D192ED03ULL);
}

std::array<uint32_t, 4> philox4x32_10(std::array<uint32_t, 4> ctr,
                                      std::array<uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const uint64_t p0 = static_cast<uint64_t>(kPhiloxM0) * ctr[0];
    const uint64_t p1 = static_cast<uint64_t>(kPhiloxM1) * ctr[2];
    const auto hi0 = static_cast<uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<uint32_t>(p0);
    const auto hi1 = static_cast<uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

RngStream::RngStream(uint64_t seed)
    : seed_(seed),
      key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)} {}

void RngStream::refill_block() {
  const auto out = philox4x32_10({static_cast<uint32_t>(counter_),
                                   static_cast<uint32_t>(counter_ >> 32), 0U, 0U},
                                  key_);
  ++counter_;
  block_[0] = (static_cast<uint64_t>(out[1]) << 32) | out[0];
  block_[1] = (static_cast<uint64_t>(out[3]) << 32) | out[2];
  block_pos_ = 0;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  has_spare_ = true;
  return u * f;
}

}  // namespace combwalk
