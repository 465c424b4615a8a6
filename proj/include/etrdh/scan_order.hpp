#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "etrdh/histogram_shift.hpp"
#include "etrdh/image.hpp"

namespace etrdh {

// Element of the symmetry group of the square. id = quarter_turns + 4 * flip:
// rotate clockwise by quarter_turns * 90 degrees, then mirror left-right if
// flip is set. id 0 is the identity.
class Orientation {
 public:
  constexpr Orientation() = default;
  constexpr explicit Orientation(std::uint8_t id) : id_(static_cast<std::uint8_t>(id & 7)) {}

  constexpr std::uint8_t id() const noexcept { return id_; }
  constexpr unsigned quarter_turns() const noexcept { return id_ & 3u; }
  constexpr bool flipped() const noexcept { return (id_ & 4u) != 0; }

  // Mirrored orientations are involutions; pure rotations invert by turning back.
  constexpr Orientation inverse() const noexcept {
    return flipped() ? *this : Orientation(static_cast<std::uint8_t>((4 - quarter_turns()) & 3));
  }

  struct Cell {
    std::size_t row;
    std::size_t col;
  };

  // Where the cell (row, col) of an n x n block lands after the transform.
  constexpr Cell apply(std::size_t row, std::size_t col, std::size_t n) const noexcept {
    for (unsigned q = 0; q < quarter_turns(); ++q) {
      const std::size_t r = row;
      row = col;
      col = n - 1 - r;
    }
    if (flipped()) col = n - 1 - col;
    return {row, col};
  }

  static constexpr std::size_t kCount = 8;

  constexpr bool operator==(const Orientation&) const = default;

 private:
  std::uint8_t id_ = 0;
};

// Applies `o` to the content of a square block (row-major, side n).
std::vector<std::uint8_t> transform_block(std::span<const std::uint8_t> block, std::size_t n,
                                          Orientation o);

// Square boolean grid marking payload slots within one block.
struct BlockMask {
  std::size_t side = 0;
  std::vector<std::uint8_t> cells;  // row-major, 0/1

  bool at(std::size_t row, std::size_t col) const { return cells[row * side + col] != 0; }
  std::size_t count() const;
};

using Signature = std::vector<std::uint32_t>;

// Ascending raster indices of the marked cells after transforming by `o`.
Signature pp_signature(const BlockMask& mask, Orientation o);

struct WithinOrder {
  Orientation orientation;
  bool ambiguous = false;
  Signature signature;
};

// The orientation with the lexicographically smallest signature. When two or
// more orientations reach it the block has a symmetry that maps slots onto
// each other, so identity is returned with ambiguous = true.
// Throws std::invalid_argument for an empty mask.
WithinOrder canonical_orientation(const BlockMask& mask);

// Cell offsets (row * side + col of the stored block) of the marked cells,
// in the raster order of the block seen under `o`.
std::vector<std::size_t> visiting_order(const BlockMask& mask, Orientation o);

// Sort key of a marked block. Invariant under the 8 orientations and under
// moving the block.
struct BlockKey {
  std::size_t count = 0;
  std::size_t n_shifted = 0;
  Signature signature;

  bool operator==(const BlockKey&) const = default;
};

// Among-block precedence: more slots first, then fewer shifted-band pixels,
// then the smaller signature.
bool key_precedes(const BlockKey& a, const BlockKey& b);

struct KeyedBlock {
  std::size_t index = 0;
  BlockKey key;
};

struct AmongEntry {
  std::size_t index = 0;
  // The key is shared with another block, so only the block index decided
  // the position of this block in the sequence.
  bool index_tied = false;
};

std::vector<AmongEntry> among_block_order(std::span<const KeyedBlock> blocks);

struct BlockPlan {
  bool member = false;
  BlockKey key;
  std::optional<WithinOrder> within;  // set for marked blocks
  bool index_tied = false;
  std::vector<std::size_t> visit;  // sample offsets in the plane, hiding order
};

struct OrderPlan {
  BlockGrid grid;
  std::vector<BlockPlan> blocks;             // indexed by block index
  std::vector<std::size_t> among;            // marked member blocks, hiding order
  std::vector<std::size_t> rot_eligible;     // ascending block indices
  std::vector<std::size_t> scr_eligible;     // ascending block indices

  // Sample offsets of every payload slot in hiding order.
  std::vector<std::size_t> slots() const;
  std::size_t capacity() const;
};

// Plan over every block of the grid. The plane must be intermediate or
// marked for `pair`; blocks must be square.
OrderPlan build_order_plan(const PixelPlane& plane, HistPair pair, const BlockGrid& grid);

// Plan restricted to the listed blocks (ascending indices). Other blocks are
// neither ordered nor eligible.
OrderPlan build_order_plan(const PixelPlane& plane, HistPair pair, const BlockGrid& grid,
                           std::span<const std::size_t> members);

}  // namespace etrdh
