#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "etrdh/image.hpp"

namespace etrdh {

// Payload bits, one per element, each 0 or 1.
using BitString = std::vector<std::uint8_t>;

using Histogram = std::array<std::size_t, 256>;

Histogram histogram(const PixelPlane& plane);

enum class Direction : std::uint8_t { Up, Down };

// Peak point / zero point pair of one plane. The shift moves the open
// interval between pp and zp one step toward zp, which empties the bin next
// to pp ("carrier" bin) to hold the 1-bits.
class HistPair {
 public:
  // Throws std::invalid_argument when pp == zp.
  HistPair(std::uint8_t pp, std::uint8_t zp);

  std::uint8_t pp() const noexcept { return pp_; }
  std::uint8_t zp() const noexcept { return zp_; }
  Direction direction() const noexcept { return pp_ < zp_ ? Direction::Up : Direction::Down; }

  // pp + 1 (Up) or pp - 1 (Down).
  std::uint8_t carrier() const noexcept {
    return direction() == Direction::Up ? static_cast<std::uint8_t>(pp_ + 1)
                                        : static_cast<std::uint8_t>(pp_ - 1);
  }

  // Value is a payload slot in an intermediate or marked plane.
  bool is_marked(std::uint8_t v) const noexcept { return v == pp_ || v == carrier(); }

  // Value lies in the band the shift produced: [pp+2, zp] (Up) or [zp, pp-2] (Down).
  bool in_shifted_band(std::uint8_t v) const noexcept {
    return direction() == Direction::Up ? (v >= pp_ + 2 && v <= zp_) : (v + 2 <= pp_ && v >= zp_);
  }

  bool operator==(const HistPair&) const = default;

 private:
  std::uint8_t pp_;
  std::uint8_t zp_;
};

// pp: the most populated bin (smallest value on ties). zp: the empty bin
// nearest to pp (the larger value on ties). Throws NoZeroPoint when every bin
// is used.
HistPair find_pp_zp(const PixelPlane& plane);

PixelPlane shift_histogram(const PixelPlane& plane, HistPair pair);
PixelPlane unshift_histogram(const PixelPlane& plane, HistPair pair);

// True when `plane` is in the shifted (intermediate or marked) state rather
// than the original-value state. The two are indistinguishable, and
// equivalent for slot detection, when zp is adjacent to pp.
bool is_shifted_state(const PixelPlane& plane, HistPair pair);

// Slots are sample offsets, each holding pp; bit k goes to slots[k].
// Throws CapacityExceeded when bits outnumber slots.
PixelPlane embed_bits(const PixelPlane& plane, HistPair pair, std::span<const std::size_t> slots,
                      std::span<const std::uint8_t> bits);

struct ExtractedBits {
  BitString bits;
  PixelPlane plane;
};

// One bit per slot; every slot is restored to pp.
ExtractedBits extract_bits(const PixelPlane& plane, HistPair pair,
                           std::span<const std::size_t> slots);

std::size_t capacity(const PixelPlane& plane, HistPair pair);

}  // namespace etrdh
