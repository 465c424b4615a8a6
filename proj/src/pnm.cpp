#include "etrdh/pnm.hpp"

#include <fstream>
#include <iterator>
#include <string>

#include "etrdh/error.hpp"

namespace etrdh {
namespace {

bool is_space(std::uint8_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }
  std::size_t last_start() const { return last_start_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t read_uint(const char* field) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size()) throw ParseError(std::string("truncated header reading ") + field, pos_);
    if (bytes_[pos_] < '0' || bytes_[pos_] > '9') {
      throw ParseError(std::string("expected decimal ") + field, pos_);
    }
    const std::size_t start = pos_;
    last_start_ = start;
    std::size_t value = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1u << 30)) throw ParseError(std::string(field) + " too large", start);
      ++pos_;
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void expect_single_space() {
    if (pos_ >= bytes_.size()) throw ParseError("truncated header after maxval", pos_);
    if (!is_space(bytes_[pos_])) throw ParseError("expected whitespace after maxval", pos_);
    ++pos_;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::size_t last_start_ = 0;
};

}  // namespace

Image decode_pnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw ParseError("not a binary PGM/PPM file (expected P5 or P6 magic)", 0);
  }
  const std::size_t channels = bytes[1] == '5' ? 1 : 3;
  HeaderReader header(bytes.subspan(2));
  const std::size_t width = header.read_uint("width");
  const std::size_t height = header.read_uint("height");
  const std::size_t maxval = header.read_uint("maxval");
  const std::size_t maxval_offset = header.last_start() + 2;
  if (maxval != 255) {
    throw ParseError("unsupported maxval " + std::to_string(maxval) + " (only 255 is accepted)",
                     maxval_offset);
  }
  header.expect_single_space();
  if (width == 0 || height == 0) throw ParseError("zero image dimension", 2);

  const std::size_t data_start = header.pos() + 2;
  const std::size_t expected = width * height * channels;
  if (bytes.size() - data_start < expected) {
    throw ParseError("truncated raster: expected " + std::to_string(expected) + " bytes, found " +
                         std::to_string(bytes.size() - data_start),
                     bytes.size());
  }
  const auto raster = bytes.subspan(data_start, expected);

  if (channels == 1) {
    return Image::gray(PixelPlane(width, height, {raster.begin(), raster.end()}));
  }
  std::vector<std::uint8_t> r(width * height), g(width * height), b(width * height);
  for (std::size_t i = 0; i < width * height; ++i) {
    r[i] = raster[3 * i];
    g[i] = raster[3 * i + 1];
    b[i] = raster[3 * i + 2];
  }
  return Image::rgb(PixelPlane(width, height, std::move(r)), PixelPlane(width, height, std::move(g)),
                    PixelPlane(width, height, std::move(b)));
}

std::vector<std::uint8_t> encode_pnm(const Image& image) {
  if (image.plane_count() != 1 && image.plane_count() != 3) {
    throw GeometryError("encode_pnm: image must have 1 or 3 planes");
  }
  const std::string header = std::string(image.is_rgb() ? "P6" : "P5") + "\n" +
                             std::to_string(image.width()) + " " + std::to_string(image.height()) +
                             "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const std::size_t n = image.width() * image.height();
  out.reserve(out.size() + n * image.plane_count());
  if (!image.is_rgb()) {
    const auto s = image.plane(0).samples();
    out.insert(out.end(), s.begin(), s.end());
    return out;
  }
  const auto r = image.plane(0).samples();
  const auto g = image.plane(1).samples();
  const auto b = image.plane(2).samples();
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(r[i]);
    out.push_back(g[i]);
    out.push_back(b[i]);
  }
  return out;
}

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_binary_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path.string());
}

Image read_image_file(const std::filesystem::path& path) {
  try {
    return decode_pnm(read_binary_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_image_file(const std::filesystem::path& path, const Image& image) {
  write_binary_file(path, encode_pnm(image));
}

}  // namespace etrdh
