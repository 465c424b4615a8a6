#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "etrdh/block_cipher.hpp"
#include "etrdh/histogram_shift.hpp"
#include "etrdh/image.hpp"

namespace etrdh {

enum class Mode : std::uint8_t { PlainFirst = 0, EncryptFirst = 1, TwoDomain = 2 };

const char* mode_name(Mode mode);

struct PlaneSideInfo {
  HistPair pair{0, 1};
  // Embedded bit count per region: one entry, or two (A, B) in two-domain mode.
  std::vector<std::uint32_t> payload_bits;

  bool operator==(const PlaneSideInfo&) const = default;
};

// Everything besides the keys that a receiver needs to extract or decrypt.
// Serialized layout (integers little-endian):
//
//   offset  size  field
//   0       4     magic "ETRD"
//   4       1     version (1)
//   5       1     mode (0 plain-first, 1 encrypted-first, 2 two-domain)
//   6       1     flags (bit 0: per-plane keys)
//   7       1     plane count P (1 or 3)
//   8       2     block width
//   10      2     block height
//   12      1     region count R (1, or 2 in two-domain mode)
//   13      P*(2+4R)  per plane: pp u8, zp u8, R x payload bit count u32
//   end-4   4     CRC-32 (ISO-HDLC, as zlib) of all preceding bytes
struct SideInfo {
  static constexpr std::uint8_t kVersion = 1;

  std::uint8_t version = kVersion;
  std::uint16_t block_w = 16;
  std::uint16_t block_h = 16;
  Mode mode = Mode::PlainFirst;
  bool per_plane = true;
  std::vector<PlaneSideInfo> planes;

  std::size_t region_count() const { return mode == Mode::TwoDomain ? 2 : 1; }
  std::size_t payload_bits(std::size_t region = 0) const;

  bool operator==(const SideInfo&) const = default;
};

std::vector<std::uint8_t> serialize_side_info(const SideInfo& side);
// Throws ParseError on malformed bytes and IntegrityError on CRC mismatch.
SideInfo parse_side_info(std::span<const std::uint8_t> bytes);
SideInfo read_side_info_file(const std::filesystem::path& path);
void write_side_info_file(const std::filesystem::path& path, const SideInfo& side);

// Two-domain assignment of blocks: label 0 = region A, 1 = region B, one bit
// per block in raster order from the region key stream.
struct RegionMap {
  std::vector<std::uint8_t> labels;

  std::vector<std::size_t> members(std::uint8_t label) const;
};

RegionMap make_region_map(const Key& region_key, const BlockGrid& grid);

struct Embedded {
  Image image;
  SideInfo side;
};

struct Extracted {
  BitString payload;
  Image image;
};

struct TwoDomainExtracted {
  BitString payload_a;
  BitString payload_b;
  Image image;
};

// The payload fills planes in order R, G, B; within a plane, marked blocks
// in among-block order, each in its canonical within-block order.
Embedded embed_plain_then_encrypt(const Image& image, const BitString& payload, const KeySet& keys,
                                  std::size_t block = 16);
Embedded encrypt_then_embed(const Image& image, const BitString& payload, const KeySet& keys,
                            std::size_t block = 16);

// Works on the encrypted output and on its decryption alike; no keys needed.
// The returned image has the payload removed and the histogram restored.
Extracted extract_from_encrypted(const Image& image, const SideInfo& side);

// Inverts scrambling then rotation/flip. Accepts the image with or without
// the payload, before or after extraction.
Image decrypt(const Image& image, const SideInfo& side, const KeySet& keys);

// Region A is embedded before encryption, region B after. Keys must carry a
// region key.
Embedded embed_two_domain(const Image& image, const BitString& payload_a,
                          const BitString& payload_b, const KeySet& keys, std::size_t block = 16);
TwoDomainExtracted extract_two_domain(const Image& image, const SideInfo& side,
                                      const Key& region_key);

struct CapacityInfo {
  std::vector<std::size_t> per_plane;
  std::size_t total = 0;
};

// Single-domain capacity: slots counted through the block plan of each plane.
CapacityInfo embedding_capacity(const Image& image, std::size_t block = 16);
// Two-domain capacity of region `label` (0 = A, 1 = B).
CapacityInfo region_capacity(const Image& image, const Key& region_key, std::uint8_t label,
                             std::size_t block = 16);

// Payload file bits: most significant bit of each byte first.
BitString bits_from_bytes(std::span<const std::uint8_t> bytes);
// Pads the final byte with zero bits.
std::vector<std::uint8_t> bytes_from_bits(const BitString& bits);

}  // namespace etrdh
