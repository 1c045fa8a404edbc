#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <unordered_set>
#include <vector>

#include "combwalk/rng.hpp"

using namespace combwalk;

TEST_CASE("philox4x32-10 known-answer vectors") {
  using A4 = std::array<uint32_t, 4>;
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("split_seed is deterministic") {
  CHECK(split_seed(42, 7) == split_seed(42, 7));
  CHECK(split_seed(0, 0) == split_seed(0, 0));
}

TEST_CASE("split_seed has no collisions over 10^6 indices") {
  std::unordered_set<uint64_t> seen;
  seen.reserve(2'000'000);
  for (uint64_t i = 0; i < 1'000'000; ++i) seen.insert(split_seed(0x1234abcdULL, i));
  CHECK(seen.size() == 1'000'000);
}

TEST_CASE("changing the master seed changes every replica seed") {
  for (uint64_t master : {0ULL, 1ULL, 99ULL, 0xdeadbeefULL}) {
    int same = 0;
    double flipped = 0.0;
    for (uint64_t i = 0; i < 10'000; ++i) {
      const uint64_t a = split_seed(master, i);
      const uint64_t b = split_seed(master + 1, i);
      same += a == b;
      flipped += std::popcount(a ^ b);
    }
    CHECK(same == 0);
    // avalanche: about half the bits change
    CHECK(flipped / 10'000 == doctest::Approx(32.0).epsilon(0.02));
  }
}

TEST_CASE("identical seeds give identical streams") {
  RngStream a(5), b(5), c(6);
  bool differ = false;
  for (int i = 0; i < 1000; ++i) {
    const uint64_t x = a.next_u64();
    CHECK(x == b.next_u64());
    differ = differ || x != c.next_u64();
  }
  CHECK(differ);
}

TEST_CASE("stream output is block i of philox under the seed's key") {
  const uint64_t seed = 0x0123456789abcdefULL;
  RngStream s(seed);
  const std::array<uint32_t, 2> key{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)};
  for (uint32_t i = 0; i < 4; ++i) {
    const auto blk = philox4x32_10({i, 0, 0, 0}, key);
    const uint64_t w0 = (uint64_t{blk[1]} << 32) | blk[0];
    const uint64_t w1 = (uint64_t{blk[3]} << 32) | blk[2];
    CHECK(s.next_u64() == w0);
    CHECK(s.next_u64() == w1);
  }
}

TEST_CASE("uniform lies in [0,1) with the right mean") {
  RngStream s(1);
  double sum = 0.0;
  const int n = 200'000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normal has mean 0 and variance 1") {
  RngStream s(2);
  const int n = 400'000;
  double m1 = 0.0, m2 = 0.0, m4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    m1 += z;
    m2 += z * z;
    m4 += z * z * z * z;
  }
  CHECK(std::abs(m1 / n) < 0.01);
  CHECK(m2 / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(m4 / n == doctest::Approx(3.0).epsilon(0.03));
}

TEST_CASE("bit and two_bits are uniform") {
  RngStream s(3);
  const int n = 400'000;
  int ones = 0;
  std::array<int, 4> cells{};
  for (int i = 0; i < n; ++i) {
    ones += s.bit();
    ++cells[s.two_bits()];
  }
  // 5 sigma bands
  CHECK(std::abs(ones - n / 2) < 5 * std::sqrt(n / 4.0));
  for (int c : cells) CHECK(std::abs(c - n / 4) < 5 * std::sqrt(n * 3.0 / 16.0));
}

TEST_CASE("geometric_half has P(k) = 2^-(k+1)") {
  RngStream s(4);
  const int n = 400'000;
  std::vector<int> hist(80, 0);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const int64_t g = s.geometric_half();
    REQUIRE(g >= 0);
    REQUIRE(g < 80);
    ++hist[static_cast<size_t>(g)];
    sum += static_cast<double>(g);
  }
  CHECK(sum / n == doctest::Approx(1.0).epsilon(0.02));
  for (int k = 0; k < 8; ++k) {
    const double p = std::ldexp(1.0, -(k + 1));
    CHECK(std::abs(hist[static_cast<size_t>(k)] - n * p) < 5 * std::sqrt(n * p * (1 - p)));
  }
}

TEST_CASE("geometric_half crosses buffer boundaries") {
  // Long runs of ones span several 64-bit words; the count must still be exact in law.
  RngStream s(8);
  int64_t big = 0;
  for (int i = 0; i < 2'000'000; ++i) big = std::max(big, s.geometric_half());
  CHECK(big >= 15);
}

TEST_CASE("substreams are distinct and reproducible") {
  RngStream root(77);
  std::set<uint64_t> firsts;
  for (uint64_t k = 0; k < 100; ++k) {
    RngStream a = root.substream(k), b = root.substream(k);
    const uint64_t x = a.next_u64();
    CHECK(x == b.next_u64());
    firsts.insert(x);
  }
  CHECK(firsts.size() == 100);
}
