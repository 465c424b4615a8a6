#include "etrdh/block_cipher.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "etrdh/error.hpp"

namespace etrdh {
namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
  });
}

}  // namespace

std::vector<std::uint8_t> StreamKey::material() const {
  std::vector<std::uint8_t> m(key.begin(), key.end());
  if (plane_tag) m.push_back(*plane_tag);
  return m;
}

KeyStream::KeyStream(const StreamKey& key, std::string_view domain_tag) {
  ensure_sodium();
  const auto material = key.material();
  crypto_generichash(stream_key_.data(), stream_key_.size(),
                     reinterpret_cast<const unsigned char*>(domain_tag.data()), domain_tag.size(),
                     material.data(), material.size());
}

void KeyStream::refill() {
  static constexpr std::array<unsigned char, crypto_stream_chacha20_NONCEBYTES> kNonce{};
  buffer_.fill(0);
  crypto_stream_chacha20_xor_ic(buffer_.data(), buffer_.data(), buffer_.size(), kNonce.data(),
                                block_counter_, stream_key_.data());
  block_counter_ += buffer_.size() / 64;
  pos_ = 0;
}

std::uint8_t KeyStream::next_byte() {
  if (pos_ == buffer_.size()) refill();
  return buffer_[pos_++];
}

std::uint32_t KeyStream::next_u32() {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(next_byte()) << (8 * i);
  return v;
}

std::uint32_t KeyStream::uniform(std::uint32_t bound) {
  if (bound == 0) throw std::invalid_argument("KeyStream::uniform: zero bound");
  // Largest multiple of bound that fits in 2^32.
  const std::uint64_t limit = (std::uint64_t{1} << 32) - ((std::uint64_t{1} << 32) % bound);
  for (;;) {
    const std::uint32_t v = next_u32();
    if (v < limit) return v % bound;
  }
}

void KeyStream::fill(std::span<std::uint8_t> out) {
  for (auto& b : out) b = next_byte();
}

KeyStream keyed_stream(const StreamKey& key, std::string_view domain_tag) {
  return KeyStream(key, domain_tag);
}

std::vector<std::size_t> keyed_permutation(std::size_t n, KeyStream& stream) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = stream.uniform(static_cast<std::uint32_t>(i));
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

PixelPlane scramble_blocks(const PixelPlane& plane, const BlockGrid& grid,
                           std::span<const std::size_t> eligible, KeyStream stream) {
  const auto perm = keyed_permutation(eligible.size(), stream);
  PixelPlane out = plane;
  for (std::size_t i = 0; i < eligible.size(); ++i) {
    if (perm[i] == i) continue;
    write_block(out, grid, eligible[i], read_block(plane, grid, eligible[perm[i]]));
  }
  return out;
}

PixelPlane unscramble_blocks(const PixelPlane& plane, const BlockGrid& grid,
                             std::span<const std::size_t> eligible, KeyStream stream) {
  const auto perm = keyed_permutation(eligible.size(), stream);
  PixelPlane out = plane;
  for (std::size_t i = 0; i < eligible.size(); ++i) {
    if (perm[i] == i) continue;
    write_block(out, grid, eligible[perm[i]], read_block(plane, grid, eligible[i]));
  }
  return out;
}

std::vector<Orientation> draw_orientations(std::size_t n, KeyStream& stream) {
  std::vector<Orientation> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(static_cast<std::uint8_t>(stream.next_byte() & 7));
  return out;
}

namespace {

PixelPlane orient_blocks(const PixelPlane& plane, const BlockGrid& grid,
                         std::span<const std::size_t> eligible, KeyStream& stream, bool invert) {
  if (!grid.square()) throw GeometryError("rotate/flip requires square blocks");
  const auto draws = draw_orientations(eligible.size(), stream);
  PixelPlane out = plane;
  for (std::size_t i = 0; i < eligible.size(); ++i) {
    const Orientation o = invert ? draws[i].inverse() : draws[i];
    if (o.id() == 0) continue;
    write_block(out, grid, eligible[i],
                transform_block(read_block(plane, grid, eligible[i]), grid.block_w, o));
  }
  return out;
}

}  // namespace

PixelPlane rotate_flip_blocks(const PixelPlane& plane, const BlockGrid& grid,
                              std::span<const std::size_t> eligible, KeyStream stream) {
  return orient_blocks(plane, grid, eligible, stream, false);
}

PixelPlane unrotate_blocks(const PixelPlane& plane, const BlockGrid& grid,
                           std::span<const std::size_t> eligible, KeyStream stream) {
  return orient_blocks(plane, grid, eligible, stream, true);
}

namespace {

Key parse_hex_key(std::string_view line, std::size_t line_no) {
  if (line.size() != 32) {
    throw ParseError("key file line " + std::to_string(line_no) + ": expected 32 hex digits, got " +
                     std::to_string(line.size()) + " characters");
  }
  Key key{};
  std::size_t bin_len = 0;
  if (sodium_hex2bin(key.data(), key.size(), line.data(), line.size(), nullptr, &bin_len,
                     nullptr) != 0 ||
      bin_len != key.size()) {
    throw ParseError("key file line " + std::to_string(line_no) + ": invalid hex digits");
  }
  return key;
}

std::string to_hex(const Key& key) {
  std::string hex(key.size() * 2 + 1, '\0');
  sodium_bin2hex(hex.data(), hex.size(), key.data(), key.size());
  hex.pop_back();
  return hex;
}

}  // namespace

KeySet parse_key_file(std::string_view text) {
  ensure_sodium();
  std::vector<Key> keys;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.remove_suffix(1);
    }
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (line.empty()) continue;
    keys.push_back(parse_hex_key(line, line_no));
  }
  if (keys.size() != 2 && keys.size() != 3) {
    throw ParseError("key file: expected 2 or 3 keys, found " + std::to_string(keys.size()));
  }
  KeySet ks;
  ks.scramble = keys[0];
  ks.orient = keys[1];
  if (keys.size() == 3) ks.region = keys[2];
  return ks;
}

std::string format_key_file(const KeySet& keys) {
  ensure_sodium();
  std::string out = to_hex(keys.scramble) + "\n" + to_hex(keys.orient) + "\n";
  if (keys.region) out += to_hex(*keys.region) + "\n";
  return out;
}

KeySet read_key_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open key file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_file(ss.str());
}

}  // namespace etrdh
