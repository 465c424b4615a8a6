#include "etrdh/histogram_shift.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "etrdh/error.hpp"

namespace etrdh {

HistPair::HistPair(std::uint8_t pp, std::uint8_t zp) : pp_(pp), zp_(zp) {
  if (pp == zp) throw std::invalid_argument("HistPair: pp and zp must differ");
}

Histogram histogram(const PixelPlane& plane) {
  Histogram h{};
  for (const auto v : plane.samples()) ++h[v];
  return h;
}

HistPair find_pp_zp(const PixelPlane& plane) {
  if (plane.empty()) throw std::invalid_argument("find_pp_zp: empty plane");
  const auto h = histogram(plane);
  // max_element returns the first maximum, i.e. the smallest value.
  const int pp = static_cast<int>(std::max_element(h.begin(), h.end()) - h.begin());
  for (int d = 1; d < 256; ++d) {
    if (pp + d < 256 && h[pp + d] == 0) return {static_cast<std::uint8_t>(pp), static_cast<std::uint8_t>(pp + d)};
    if (pp - d >= 0 && h[pp - d] == 0) return {static_cast<std::uint8_t>(pp), static_cast<std::uint8_t>(pp - d)};
  }
  throw NoZeroPoint("histogram has no empty bin (peak at " + std::to_string(pp) + ")");
}

PixelPlane shift_histogram(const PixelPlane& plane, HistPair pair) {
  PixelPlane out = plane;
  const int pp = pair.pp(), zp = pair.zp();
  for (auto& v : out.samples()) {
    if (pp < zp && v > pp && v < zp) {
      ++v;
    } else if (pp > zp && v < pp && v > zp) {
      --v;
    }
  }
  return out;
}

PixelPlane unshift_histogram(const PixelPlane& plane, HistPair pair) {
  PixelPlane out = plane;
  for (auto& v : out.samples()) {
    if (!pair.in_shifted_band(v)) continue;
    v = pair.direction() == Direction::Up ? v - 1 : v + 1;
  }
  return out;
}

bool is_shifted_state(const PixelPlane& plane, HistPair pair) {
  const int gap = std::abs(int(pair.zp()) - int(pair.pp()));
  if (gap == 1) return true;
  // zp is empty in the original; after a non-trivial shift it receives the
  // bin just inside it, which is non-empty because zp is the nearest empty bin.
  return histogram(plane)[pair.zp()] != 0;
}

PixelPlane embed_bits(const PixelPlane& plane, HistPair pair, std::span<const std::size_t> slots,
                      std::span<const std::uint8_t> bits) {
  if (bits.size() > slots.size()) {
    throw CapacityExceeded("CapacityExceeded: " + std::to_string(bits.size()) +
                           " bits exceed " + std::to_string(slots.size()) + " slots");
  }
  PixelPlane out = plane;
  auto s = out.samples();
  for (std::size_t k = 0; k < bits.size(); ++k) {
    auto& v = s[slots[k]];
    if (v != pair.pp()) {
      throw std::invalid_argument("embed_bits: slot " + std::to_string(k) + " does not hold pp");
    }
    if (bits[k]) v = pair.carrier();
  }
  return out;
}

ExtractedBits extract_bits(const PixelPlane& plane, HistPair pair,
                           std::span<const std::size_t> slots) {
  ExtractedBits result{BitString(slots.size(), 0), plane};
  auto s = result.plane.samples();
  const auto carrier = pair.carrier();
  for (std::size_t k = 0; k < slots.size(); ++k) {
    auto& v = s[slots[k]];
    if (v == carrier) {
      result.bits[k] = 1;
      v = pair.pp();
    } else if (v != pair.pp()) {
      throw std::invalid_argument("extract_bits: slot " + std::to_string(k) + " is not marked");
    }
  }
  return result;
}

std::size_t capacity(const PixelPlane& plane, HistPair pair) { return histogram(plane)[pair.pp()]; }

}  // namespace etrdh
