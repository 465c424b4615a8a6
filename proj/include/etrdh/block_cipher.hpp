#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "etrdh/image.hpp"
#include "etrdh/scan_order.hpp"

namespace etrdh {

using Key = std::array<std::uint8_t, 16>;

// Key material fed to the stream generator: a 16-byte key, optionally
// followed by a plane tag byte when colour components are keyed separately.
struct StreamKey {
  Key key{};
  std::optional<std::uint8_t> plane_tag;

  std::vector<std::uint8_t> material() const;
};

struct KeySet {
  Key scramble{};               // position scrambling
  Key orient{};                 // rotation / flip
  std::optional<Key> region;    // two-domain block assignment
  bool per_plane = true;        // independent subkeys per colour component

  StreamKey scramble_key(std::size_t plane) const { return derive(scramble, plane); }
  StreamKey orient_key(std::size_t plane) const { return derive(orient, plane); }

 private:
  StreamKey derive(const Key& k, std::size_t plane) const {
    return per_plane ? StreamKey{k, static_cast<std::uint8_t>(plane)} : StreamKey{k, std::nullopt};
  }
};

// Deterministic byte stream keyed by (key material, domain tag):
// ChaCha20 (64-bit nonce, all zero) under the 32-byte BLAKE2b digest of the
// tag keyed with the material.
class KeyStream {
 public:
  KeyStream(const StreamKey& key, std::string_view domain_tag);

  std::uint8_t next_byte();
  std::uint32_t next_u32();  // little-endian assembly of 4 bytes
  // Uniform in [0, bound), rejection sampling; bound must be positive.
  std::uint32_t uniform(std::uint32_t bound);
  void fill(std::span<std::uint8_t> out);

 private:
  void refill();

  std::array<std::uint8_t, 32> stream_key_{};
  std::uint64_t block_counter_ = 0;
  std::array<std::uint8_t, 4096> buffer_{};
  std::size_t pos_ = 4096;
};

KeyStream keyed_stream(const StreamKey& key, std::string_view domain_tag);

// Unbiased Fisher-Yates over [0, n): result[i] is the source slot that moves to slot i.
std::vector<std::size_t> keyed_permutation(std::size_t n, KeyStream& stream);

// Scramble eligible block positions (ascending) among themselves.
PixelPlane scramble_blocks(const PixelPlane& plane, const BlockGrid& grid,
                           std::span<const std::size_t> eligible, KeyStream stream);
PixelPlane unscramble_blocks(const PixelPlane& plane, const BlockGrid& grid,
                             std::span<const std::size_t> eligible, KeyStream stream);

// One orientation per eligible block, drawn in list order from the low three
// bits of consecutive stream bytes.
std::vector<Orientation> draw_orientations(std::size_t n, KeyStream& stream);

PixelPlane rotate_flip_blocks(const PixelPlane& plane, const BlockGrid& grid,
                              std::span<const std::size_t> eligible, KeyStream stream);
PixelPlane unrotate_blocks(const PixelPlane& plane, const BlockGrid& grid,
                           std::span<const std::size_t> eligible, KeyStream stream);

// Domain tags used by the pipeline.
inline constexpr std::string_view kScrambleTag = "scr";
inline constexpr std::string_view kOrientTag = "rot";
inline constexpr std::string_view kRegionTag = "region";

// Key file: one key per line as 32 hex digits, order scramble, orient, [region].
KeySet parse_key_file(std::string_view text);
std::string format_key_file(const KeySet& keys);
KeySet read_key_file(const std::filesystem::path& path);

}  // namespace etrdh
