#include "etrdh/image.hpp"

#include <algorithm>
#include <string>

#include "etrdh/error.hpp"

namespace etrdh {

PixelPlane::PixelPlane(std::size_t width, std::size_t height, std::uint8_t fill)
    : width_(width), height_(height), samples_(width * height, fill) {}

PixelPlane::PixelPlane(std::size_t width, std::size_t height, std::vector<std::uint8_t> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  if (samples_.size() != width_ * height_) {
    throw GeometryError("PixelPlane: sample count " + std::to_string(samples_.size()) +
                        " does not match " + std::to_string(width_) + "x" +
                        std::to_string(height_));
  }
}

Image Image::gray(PixelPlane plane) {
  std::vector<PixelPlane> planes;
  planes.push_back(std::move(plane));
  return Image(std::move(planes));
}

Image Image::rgb(PixelPlane r, PixelPlane g, PixelPlane b) {
  std::vector<PixelPlane> planes;
  planes.reserve(3);
  planes.push_back(std::move(r));
  planes.push_back(std::move(g));
  planes.push_back(std::move(b));
  return from_planes(std::move(planes));
}

Image Image::from_planes(std::vector<PixelPlane> planes) {
  if (planes.size() != 1 && planes.size() != 3) {
    throw GeometryError("Image: expected 1 or 3 planes, got " + std::to_string(planes.size()));
  }
  for (const auto& p : planes) {
    if (p.width() != planes[0].width() || p.height() != planes[0].height()) {
      throw GeometryError("Image: planes differ in dimensions");
    }
  }
  return Image(std::move(planes));
}

BlockGrid split_blocks(std::size_t width, std::size_t height, std::size_t block_w,
                       std::size_t block_h) {
  if (block_w == 0 || block_h == 0) {
    throw GeometryError("split_blocks: block dimensions must be positive");
  }
  if (width == 0 || height == 0) {
    throw GeometryError("split_blocks: empty plane");
  }
  if (width % block_w != 0 || height % block_h != 0) {
    throw GeometryError("split_blocks: " + std::to_string(width) + "x" + std::to_string(height) +
                        " is not divisible into " + std::to_string(block_w) + "x" +
                        std::to_string(block_h) + " blocks");
  }
  return BlockGrid{block_w, block_h, width / block_w, height / block_h};
}

BlockGrid split_blocks(const PixelPlane& plane, std::size_t block_w, std::size_t block_h) {
  return split_blocks(plane.width(), plane.height(), block_w, block_h);
}

std::vector<std::uint8_t> read_block(const PixelPlane& plane, const BlockGrid& grid,
                                     std::size_t index) {
  std::vector<std::uint8_t> out(grid.block_pixels());
  const auto src = plane.samples();
  for (std::size_t y = 0; y < grid.block_h; ++y) {
    const auto row = src.subspan(grid.sample_offset(index, 0, y), grid.block_w);
    std::copy(row.begin(), row.end(), out.begin() + static_cast<std::ptrdiff_t>(y * grid.block_w));
  }
  return out;
}

void write_block(PixelPlane& plane, const BlockGrid& grid, std::size_t index,
                 std::span<const std::uint8_t> samples) {
  auto dst = plane.samples();
  for (std::size_t y = 0; y < grid.block_h; ++y) {
    std::copy_n(samples.begin() + static_cast<std::ptrdiff_t>(y * grid.block_w), grid.block_w,
                dst.begin() + static_cast<std::ptrdiff_t>(grid.sample_offset(index, 0, y)));
  }
}

std::vector<PlacedBlock> detach_blocks(const PixelPlane& plane, const BlockGrid& grid) {
  std::vector<PlacedBlock> blocks;
  blocks.reserve(grid.count());
  for (std::size_t a = 0; a < grid.count(); ++a) {
    blocks.push_back({a, read_block(plane, grid, a)});
  }
  return blocks;
}

PixelPlane concat_blocks(const BlockGrid& grid, std::span<const PlacedBlock> blocks) {
  std::vector<bool> seen(grid.count(), false);
  PixelPlane plane(grid.width(), grid.height());
  for (const auto& block : blocks) {
    if (block.index >= grid.count()) {
      throw GeometryError("concat_blocks: block index " + std::to_string(block.index) +
                          " out of range");
    }
    if (seen[block.index]) {
      throw GeometryError("concat_blocks: block slot " + std::to_string(block.index) +
                          " populated twice");
    }
    if (block.samples.size() != grid.block_pixels()) {
      throw GeometryError("concat_blocks: block " + std::to_string(block.index) +
                          " has wrong sample count");
    }
    seen[block.index] = true;
    write_block(plane, grid, block.index, block.samples);
  }
  const auto missing = std::find(seen.begin(), seen.end(), false);
  if (missing != seen.end()) {
    throw GeometryError("concat_blocks: block slot " +
                        std::to_string(missing - seen.begin()) + " missing");
  }
  return plane;
}

}  // namespace etrdh
