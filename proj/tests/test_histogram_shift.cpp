#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "etrdh/analysis.hpp"
#include "etrdh/error.hpp"
#include "etrdh/histogram_shift.hpp"
#include "support/generators.hpp"

using namespace etrdh;

namespace {

const PixelPlane kExample(4, 4, {1, 2, 2, 3, 2, 5, 2, 0, 2, 7, 2, 2, 9, 2, 2, 4});

// Brute-force reference: scan every candidate pair directly.
HistPair oracle_pair(const PixelPlane& p) {
  std::vector<std::size_t> counts(256, 0);
  for (auto v : p.samples()) counts[v]++;
  int pp = 0;
  for (int v = 0; v < 256; ++v)
    if (counts[v] > counts[pp]) pp = v;
  int best = -1;
  for (int v = 0; v < 256; ++v) {
    if (counts[v] != 0) continue;
    if (best < 0 || std::abs(v - pp) < std::abs(best - pp) ||
        (std::abs(v - pp) == std::abs(best - pp) && v > best))
      best = v;
  }
  REQUIRE(best >= 0);
  return HistPair(static_cast<std::uint8_t>(pp), static_cast<std::uint8_t>(best));
}

std::vector<std::size_t> positions_of(const PixelPlane& p, std::uint8_t v) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p.samples()[i] == v) out.push_back(i);
  return out;
}

}  // namespace

TEST_CASE("peak and zero of the 4x4 example") {
  const auto pair = find_pp_zp(kExample);
  CHECK(pair.pp() == 2);
  CHECK(pair.zp() == 6);
  CHECK(pair.direction() == Direction::Up);
  CHECK(capacity(kExample, pair) == 9);
  CHECK(pair == oracle_pair(kExample));
}

TEST_CASE("constant plane ties the zero point toward the larger value") {
  const PixelPlane p(8, 8, 7);
  const auto pair = find_pp_zp(p);
  CHECK(pair.pp() == 7);
  CHECK(pair.zp() == 8);
  CHECK(pair.direction() == Direction::Up);
  CHECK(capacity(p, pair) == 64);
}

TEST_CASE("peak ties choose the smallest value") {
  const PixelPlane p(4, 1, {10, 10, 20, 20});
  CHECK(find_pp_zp(p).pp() == 10);
  CHECK(find_pp_zp(p).zp() == 11);
}

TEST_CASE("saturated peak shifts downward") {
  const PixelPlane p(4, 1, {255, 255, 254, 100});
  const auto pair = find_pp_zp(p);
  CHECK(pair.pp() == 255);
  CHECK(pair.zp() == 253);
  CHECK(pair.direction() == Direction::Down);
  CHECK(pair.carrier() == 254);
}

TEST_CASE("every bin used raises NoZeroPoint") {
  PixelPlane p(16, 16);
  for (std::size_t i = 0; i < 256; ++i) p.samples()[i] = static_cast<std::uint8_t>(i);
  CHECK_THROWS_AS(find_pp_zp(p), NoZeroPoint);
}

TEST_CASE("pair rejects pp == zp") { CHECK_THROWS_AS(HistPair(4, 4), std::invalid_argument); }

TEST_CASE("find_pp_zp agrees with the brute-force oracle") {
  testing::Rng rng(3);
  for (int t = 0; t < 300; ++t) {
    const int lo = static_cast<int>(testing::uniform_index(rng, 200));
    const int hi = lo + static_cast<int>(testing::uniform_index(rng, 56));
    const auto p = testing::noise_plane(rng, 8, 8, lo, hi);
    CHECK(find_pp_zp(p) == oracle_pair(p));
  }
}

TEST_CASE("shift moves the open interval one step toward zp") {
  const HistPair pair(2, 6);
  const auto s = shift_histogram(kExample, pair);
  for (std::size_t i = 0; i < kExample.size(); ++i) {
    const auto v = kExample.samples()[i];
    const auto w = s.samples()[i];
    if (v > 2 && v < 6) {
      CHECK(w == v + 1);
    } else {
      CHECK(w == v);
    }
  }
  CHECK(histogram(s)[3] == 0);
  CHECK(unshift_histogram(s, pair) == kExample);
}

TEST_CASE("downward shift decrements the interval") {
  const PixelPlane p(6, 1, {9, 9, 6, 7, 8, 2});
  const HistPair pair(9, 5);
  CHECK(pair.direction() == Direction::Down);
  const auto s = shift_histogram(p, pair);
  CHECK(s == PixelPlane(6, 1, {9, 9, 5, 6, 7, 2}));
  CHECK(unshift_histogram(s, pair) == p);
}

TEST_CASE("adjacent zero point leaves the plane unchanged") {
  const PixelPlane p(4, 1, {3, 3, 5, 9});
  const HistPair pair(3, 4);
  CHECK(shift_histogram(p, pair) == p);
  CHECK(unshift_histogram(p, pair) == p);
}

TEST_CASE("shift and unshift invert on 1000 random planes") {
  testing::Rng rng(17);
  for (int t = 0; t < 1000; ++t) {
    const int lo = static_cast<int>(testing::uniform_index(rng, 256));
    const int hi = std::min(255, lo + static_cast<int>(testing::uniform_index(rng, 120)));
    const auto p = testing::noise_plane(rng, 16, 16, lo, hi);
    const auto pair = find_pp_zp(p);
    const auto s = shift_histogram(p, pair);
    REQUIRE(histogram(s)[pair.carrier()] == 0);
    for (std::size_t i = 0; i < p.size(); ++i)
      REQUIRE(std::abs(int(s.samples()[i]) - int(p.samples()[i])) <= 1);
    REQUIRE(unshift_histogram(s, pair) == p);
  }
}

TEST_CASE("embed moves one-bits to the carrier") {
  const HistPair pair(2, 6);
  const auto s = shift_histogram(kExample, pair);
  const auto slots = positions_of(s, 2);
  REQUIRE(slots.size() == 9);
  const std::vector<std::size_t> first3(slots.begin(), slots.begin() + 3);
  const BitString bits{1, 0, 1};
  const auto m = embed_bits(s, pair, first3, bits);
  CHECK(m.samples()[first3[0]] == 3);
  CHECK(m.samples()[first3[1]] == 2);
  CHECK(m.samples()[first3[2]] == 3);
  for (std::size_t k = 3; k < slots.size(); ++k) CHECK(m.samples()[slots[k]] == 2);

  const auto ex = extract_bits(m, pair, first3);
  CHECK(ex.bits == bits);
  CHECK(ex.plane == s);

  CHECK(embed_bits(s, pair, slots, BitString{}) == s);
}

TEST_CASE("too many bits raise CapacityExceeded") {
  const HistPair pair(2, 6);
  const auto s = shift_histogram(kExample, pair);
  const auto slots = positions_of(s, 2);
  const std::vector<std::size_t> three(slots.begin(), slots.begin() + 3);
  CHECK_THROWS_AS(embed_bits(s, pair, three, BitString{1, 1, 0, 1, 0}), CapacityExceeded);
}

TEST_CASE("extract with no slots is the identity") {
  const auto ex = extract_bits(kExample, HistPair(2, 6), {});
  CHECK(ex.bits.empty());
  CHECK(ex.plane == kExample);
}

TEST_CASE("full-capacity payloads round trip in any slot order") {
  testing::Rng rng(29);
  for (int t = 0; t < 200; ++t) {
    const auto p = testing::noise_plane(rng, 16, 16, 0, 80 + static_cast<int>(t % 100));
    const auto pair = find_pp_zp(p);
    const auto s = shift_histogram(p, pair);
    auto slots = positions_of(s, pair.pp());
    std::shuffle(slots.begin(), slots.end(), rng);
    const BitString bits =
        t % 3 == 0 ? BitString(slots.size(), 1) : testing::random_bits(rng, slots.size());
    const auto m = embed_bits(s, pair, slots, bits);

    // Marked positions are exactly the original slot positions.
    std::size_t marked = 0;
    for (std::size_t i = 0; i < m.size(); ++i) marked += pair.is_marked(m.samples()[i]);
    CHECK(marked == slots.size());

    // Each sample moved by at most one, so PSNR clears 48.13 dB.
    const auto original = Image::gray(p);
    const auto marked_img = Image::gray(m);
    CHECK(mse(original, marked_img) <= 1.0);
    CHECK(psnr(original, marked_img) >= 48.13);

    const auto ex = extract_bits(m, pair, slots);
    CHECK(ex.bits == bits);
    CHECK(unshift_histogram(ex.plane, pair) == p);
  }
}

TEST_CASE("shifted state detection") {
  const HistPair pair(2, 6);
  CHECK_FALSE(is_shifted_state(kExample, pair));
  CHECK(is_shifted_state(shift_histogram(kExample, pair), pair));
}
