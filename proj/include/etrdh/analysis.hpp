#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "etrdh/image.hpp"

namespace etrdh {

// Returned by psnr() for identical inputs.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

double mse(const Image& a, const Image& b);
// 10 log10(255^2 / MSE) over every sample of every plane.
double psnr(const Image& a, const Image& b);

// One pixel per block: the top-left sample of each block.
Image resize_topleft(const Image& image, std::size_t block_w, std::size_t block_h);

enum class Neighbor : std::uint8_t { Horizontal, Vertical, Diagonal };

const char* neighbor_name(Neighbor n);

// Correlation coefficient of `pairs` neighbouring-pixel pairs drawn without
// replacement from the valid anchor positions (seeded). Moments use divisor
// S. Throws DegenerateSample when either coordinate has zero variance and
// std::invalid_argument when fewer than `pairs` anchors exist.
double correlation(const PixelPlane& plane, Neighbor direction, std::size_t pairs,
                   std::uint64_t seed);

struct CorrelationReport {
  double r_horizontal = 0;
  double r_vertical = 0;
  double r_diagonal = 0;
  std::size_t pairs = 0;
};

// For RGB images each value is the mean over the three planes; plane p uses
// seed + p.
CorrelationReport correlation_report(const Image& image, std::size_t pairs, std::uint64_t seed);

struct CapacityReport {
  std::size_t block = 0;
  std::vector<std::size_t> per_plane;
  std::size_t total = 0;
};

CapacityReport capacity_report(const Image& image, std::size_t block);

// External lossless codec driven through shell command templates. The
// placeholders {in} and {out} are replaced by quoted file paths.
struct CodecSpec {
  std::string name;
  std::string encode;
  std::optional<std::string> decode;
  std::string extension = ".bin";  // compressed file suffix
};

// JSON: {"codecs": [{"name": ..., "encode": ..., "decode": ..., "extension": ...}]}
// "{config_dir}" in a template expands to the directory holding the file.
// It is inserted unquoted, so that directory path must not need quoting.
std::vector<CodecSpec> load_codec_config(const std::filesystem::path& path);

struct CompressionResult {
  std::string codec;
  std::size_t original_bytes = 0;
  std::size_t compressed_bytes = 0;
  double ratio = 0;  // original / compressed
  bool verified = false;  // decoder round trip checked
};

// Throws CodecError when a command fails and LossyCodec when the decoded
// image differs from the input.
CompressionResult compression_eval(const std::filesystem::path& image_file, const CodecSpec& codec);

}  // namespace etrdh
