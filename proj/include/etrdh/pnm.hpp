#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "etrdh/image.hpp"

namespace etrdh {

// Binary PGM (P5) and PPM (P6) with maxval 255. Comments are accepted in the
// header and never written. A P5 file decodes to a one-plane image, P6 to
// three planes.
Image decode_pnm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pnm(const Image& image);

Image read_image_file(const std::filesystem::path& path);
void write_image_file(const std::filesystem::path& path, const Image& image);

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);
void write_binary_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace etrdh
