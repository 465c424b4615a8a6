#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace etrdh {

// One 8-bit channel, row-major.
class PixelPlane {
 public:
  PixelPlane() = default;
  PixelPlane(std::size_t width, std::size_t height, std::uint8_t fill = 0);
  PixelPlane(std::size_t width, std::size_t height, std::vector<std::uint8_t> samples);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }

  std::span<const std::uint8_t> samples() const noexcept { return samples_; }
  std::span<std::uint8_t> samples() noexcept { return samples_; }

  std::uint8_t at(std::size_t x, std::size_t y) const { return samples_[y * width_ + x]; }
  std::uint8_t& at(std::size_t x, std::size_t y) { return samples_[y * width_ + x]; }

  bool operator==(const PixelPlane&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> samples_;
};

// Grayscale (one plane) or RGB (three planes, R, G, B) image.
class Image {
 public:
  Image() = default;
  static Image gray(PixelPlane plane);
  static Image rgb(PixelPlane r, PixelPlane g, PixelPlane b);
  // Accepts 1 or 3 planes of identical dimensions.
  static Image from_planes(std::vector<PixelPlane> planes);

  bool is_rgb() const noexcept { return planes_.size() == 3; }
  std::size_t width() const noexcept { return planes_.empty() ? 0 : planes_[0].width(); }
  std::size_t height() const noexcept { return planes_.empty() ? 0 : planes_[0].height(); }
  std::size_t plane_count() const noexcept { return planes_.size(); }

  const PixelPlane& plane(std::size_t i) const { return planes_.at(i); }
  PixelPlane& plane(std::size_t i) { return planes_.at(i); }
  const std::vector<PixelPlane>& planes() const noexcept { return planes_; }

  bool operator==(const Image&) const = default;

 private:
  explicit Image(std::vector<PixelPlane> planes) : planes_(std::move(planes)) {}
  std::vector<PixelPlane> planes_;
};

// Partition of a plane into equal blocks. Block index a enumerates block
// positions in raster order: row = a / cols, col = a % cols.
struct BlockGrid {
  std::size_t block_w = 0;
  std::size_t block_h = 0;
  std::size_t cols = 0;
  std::size_t rows = 0;

  std::size_t count() const noexcept { return cols * rows; }
  std::size_t width() const noexcept { return block_w * cols; }
  std::size_t height() const noexcept { return block_h * rows; }
  std::size_t block_pixels() const noexcept { return block_w * block_h; }
  bool square() const noexcept { return block_w == block_h; }

  std::size_t row_of(std::size_t index) const noexcept { return index / cols; }
  std::size_t col_of(std::size_t index) const noexcept { return index % cols; }
  std::size_t index_of(std::size_t row, std::size_t col) const noexcept { return row * cols + col; }

  // Sample offset in the plane of pixel (x, y) inside block `index`.
  std::size_t sample_offset(std::size_t index, std::size_t x, std::size_t y) const noexcept {
    return (row_of(index) * block_h + y) * width() + col_of(index) * block_w + x;
  }

  bool operator==(const BlockGrid&) const = default;
};

// Block content detached from the plane, tagged with the slot it belongs to.
struct PlacedBlock {
  std::size_t index = 0;
  std::vector<std::uint8_t> samples;  // block_w * block_h, row-major
};

// Throws GeometryError when the plane is not an exact multiple of the block.
BlockGrid split_blocks(const PixelPlane& plane, std::size_t block_w, std::size_t block_h);
BlockGrid split_blocks(std::size_t width, std::size_t height, std::size_t block_w,
                       std::size_t block_h);

std::vector<std::uint8_t> read_block(const PixelPlane& plane, const BlockGrid& grid,
                                     std::size_t index);
void write_block(PixelPlane& plane, const BlockGrid& grid, std::size_t index,
                 std::span<const std::uint8_t> samples);

std::vector<PlacedBlock> detach_blocks(const PixelPlane& plane, const BlockGrid& grid);

// Every slot must be populated exactly once; throws GeometryError otherwise.
PixelPlane concat_blocks(const BlockGrid& grid, std::span<const PlacedBlock> blocks);

}  // namespace etrdh
