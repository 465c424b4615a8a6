#include "etrdh/pipeline.hpp"

#include <zlib.h>

#include <algorithm>
#include <iterator>
#include <numeric>
#include <optional>
#include <string>

#include "etrdh/error.hpp"
#include "etrdh/pnm.hpp"
#include "etrdh/scan_order.hpp"

namespace etrdh {

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::PlainFirst: return "plain-first";
    case Mode::EncryptFirst: return "encrypted-first";
    case Mode::TwoDomain: return "two-domain";
  }
  return "unknown";
}

std::size_t SideInfo::payload_bits(std::size_t region) const {
  std::size_t total = 0;
  for (const auto& p : planes) total += p.payload_bits.at(region);
  return total;
}

// ---------------------------------------------------------------------------
// Side information file

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'E', 'T', 'R', 'D'};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  return static_cast<std::uint32_t>(
      crc32(crc32(0L, Z_NULL, 0), bytes.data(), static_cast<uInt>(bytes.size())));
}

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }

  std::uint8_t u8(const char* field) {
    need(1, field);
    return bytes_[pos_++];
  }
  std::uint16_t u16(const char* field) {
    need(2, field);
    const std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32(const char* field) {
    need(4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }

 private:
  void need(std::size_t n, const char* field) const {
    if (bytes_.size() - pos_ < n) throw ParseError(std::string("side info truncated in ") + field, pos_);
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_side_info(const SideInfo& side) {
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  out.push_back(side.version);
  out.push_back(static_cast<std::uint8_t>(side.mode));
  out.push_back(side.per_plane ? 1 : 0);
  out.push_back(static_cast<std::uint8_t>(side.planes.size()));
  put_u16(out, side.block_w);
  put_u16(out, side.block_h);
  const std::size_t regions = side.region_count();
  out.push_back(static_cast<std::uint8_t>(regions));
  for (const auto& p : side.planes) {
    if (p.payload_bits.size() != regions) {
      throw std::invalid_argument("serialize_side_info: payload length count does not match mode");
    }
    out.push_back(p.pair.pp());
    out.push_back(p.pair.zp());
    for (const auto n : p.payload_bits) put_u32(out, n);
  }
  put_u32(out, crc32_of(out));
  return out;
}

SideInfo parse_side_info(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size() || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw ParseError("side info: bad magic (expected \"ETRD\")", 0);
  }
  if (bytes.size() < 4 + 9 + 4) throw ParseError("side info truncated", bytes.size());

  ByteReader in(bytes.first(bytes.size() - 4));
  in.u32("magic");
  SideInfo side;
  side.version = in.u8("version");
  if (side.version != SideInfo::kVersion) {
    throw ParseError("side info: unsupported version " + std::to_string(side.version), 4);
  }
  const auto mode = in.u8("mode");
  if (mode > 2) throw ParseError("side info: unknown mode " + std::to_string(mode), 5);
  side.mode = static_cast<Mode>(mode);
  const auto flags = in.u8("flags");
  if (flags > 1) throw ParseError("side info: unknown flags", 6);
  side.per_plane = (flags & 1) != 0;
  const auto planes = in.u8("plane count");
  if (planes != 1 && planes != 3) throw ParseError("side info: plane count must be 1 or 3", 7);
  side.block_w = in.u16("block width");
  side.block_h = in.u16("block height");
  const auto regions = in.u8("region count");
  if (regions != side.region_count()) {
    throw ParseError("side info: region count does not match mode", 12);
  }
  for (std::size_t p = 0; p < planes; ++p) {
    const std::size_t at = in.pos();
    const auto pp = in.u8("pp");
    const auto zp = in.u8("zp");
    if (pp == zp) throw ParseError("side info: pp equals zp", at);
    PlaneSideInfo ps{HistPair(pp, zp), {}};
    for (std::size_t r = 0; r < regions; ++r) ps.payload_bits.push_back(in.u32("payload length"));
    side.planes.push_back(std::move(ps));
  }
  if (in.pos() != bytes.size() - 4) {
    throw ParseError("side info: trailing bytes before checksum", in.pos());
  }
  ByteReader tail(bytes.last(4));
  const auto stored = tail.u32("checksum");
  if (stored != crc32_of(bytes.first(bytes.size() - 4))) {
    throw IntegrityError("side info: CRC-32 mismatch");
  }
  return side;
}

SideInfo read_side_info_file(const std::filesystem::path& path) {
  return parse_side_info(read_binary_file(path));
}

void write_side_info_file(const std::filesystem::path& path, const SideInfo& side) {
  write_binary_file(path, serialize_side_info(side));
}

// ---------------------------------------------------------------------------
// Regions

std::vector<std::size_t> RegionMap::members(std::uint8_t label) const {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < labels.size(); ++a) {
    if (labels[a] == label) out.push_back(a);
  }
  return out;
}

RegionMap make_region_map(const Key& region_key, const BlockGrid& grid) {
  KeyStream stream(StreamKey{region_key, std::nullopt}, kRegionTag);
  RegionMap map;
  map.labels.resize(grid.count());
  for (auto& l : map.labels) l = stream.next_byte() & 1;
  return map;
}

// ---------------------------------------------------------------------------
// Flows

namespace {

struct Layout {
  BlockGrid grid;
  std::vector<std::vector<std::size_t>> regions;  // block indices per region
  bool two_domain = false;

  std::string scramble_tag(std::size_t region) const {
    if (!two_domain) return std::string(kScrambleTag);
    return std::string(kScrambleTag) + (region == 0 ? ".A" : ".B");
  }
};

Layout make_layout(const Image& image, std::size_t bw, std::size_t bh,
                   const std::optional<Key>& region_key) {
  if (image.plane_count() == 0) throw GeometryError("empty image");
  if (bw != bh) throw GeometryError("blocks must be square (rotation/flip is always applied)");
  Layout layout;
  layout.grid = split_blocks(image.width(), image.height(), bw, bh);
  if (region_key) {
    layout.two_domain = true;
    const auto map = make_region_map(*region_key, layout.grid);
    layout.regions = {map.members(0), map.members(1)};
  } else {
    std::vector<std::size_t> all(layout.grid.count());
    std::iota(all.begin(), all.end(), std::size_t{0});
    layout.regions = {std::move(all)};
  }
  return layout;
}

Layout layout_for(const Image& image, const SideInfo& side, const std::optional<Key>& region_key) {
  if (image.plane_count() != side.planes.size()) {
    throw IntegrityError("side info describes " + std::to_string(side.planes.size()) +
                         " planes, image has " + std::to_string(image.plane_count()));
  }
  if (side.mode == Mode::TwoDomain && !region_key) {
    throw Error("two-domain side info requires a region key");
  }
  return make_layout(image, side.block_w, side.block_h,
                     side.mode == Mode::TwoDomain ? region_key : std::nullopt);
}

std::vector<HistPair> pairs_of(const SideInfo& side) {
  std::vector<HistPair> pairs;
  for (const auto& p : side.planes) pairs.push_back(p.pair);
  return pairs;
}

// Slot detection needs the shifted state; an un-shifted plane is viewed
// through the shift, which leaves block positions untouched.
PixelPlane plan_view(const PixelPlane& plane, HistPair pair) {
  return is_shifted_state(plane, pair) ? plane : shift_histogram(plane, pair);
}

std::vector<OrderPlan> region_plans(const PixelPlane& plane, HistPair pair, const Layout& layout) {
  std::vector<OrderPlan> plans;
  for (const auto& members : layout.regions) {
    plans.push_back(build_order_plan(plane, pair, layout.grid, members));
  }
  return plans;
}

struct Eligible {
  std::vector<std::size_t> rot;
  std::vector<std::vector<std::size_t>> scr;  // per region
};

std::vector<std::size_t> intersect(const std::vector<std::size_t>& a,
                                   const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<Eligible> eligibility(const Image& image, const std::vector<HistPair>& pairs,
                                  const Layout& layout, bool per_plane) {
  std::vector<Eligible> out;
  for (std::size_t p = 0; p < image.plane_count(); ++p) {
    const auto plans = region_plans(plan_view(image.plane(p), pairs[p]), pairs[p], layout);
    Eligible e;
    for (const auto& plan : plans) {
      e.rot.insert(e.rot.end(), plan.rot_eligible.begin(), plan.rot_eligible.end());
      e.scr.push_back(plan.scr_eligible);
    }
    std::sort(e.rot.begin(), e.rot.end());
    out.push_back(std::move(e));
  }
  if (!per_plane) {
    // One shared permutation for all planes: only blocks eligible everywhere move.
    Eligible joint = out[0];
    for (std::size_t p = 1; p < out.size(); ++p) {
      joint.rot = intersect(joint.rot, out[p].rot);
      for (std::size_t r = 0; r < joint.scr.size(); ++r) {
        joint.scr[r] = intersect(joint.scr[r], out[p].scr[r]);
      }
    }
    std::fill(out.begin(), out.end(), joint);
  }
  return out;
}

Image encrypt_image(const Image& image, const std::vector<HistPair>& pairs, const Layout& layout,
                    const KeySet& keys) {
  const auto elig = eligibility(image, pairs, layout, keys.per_plane);
  std::vector<PixelPlane> planes;
  for (std::size_t p = 0; p < image.plane_count(); ++p) {
    auto plane = rotate_flip_blocks(image.plane(p), layout.grid, elig[p].rot,
                                    KeyStream(keys.orient_key(p), kOrientTag));
    for (std::size_t r = 0; r < layout.regions.size(); ++r) {
      plane = scramble_blocks(plane, layout.grid, elig[p].scr[r],
                              KeyStream(keys.scramble_key(p), layout.scramble_tag(r)));
    }
    planes.push_back(std::move(plane));
  }
  return Image::from_planes(std::move(planes));
}

Image decrypt_image(const Image& image, const std::vector<HistPair>& pairs, const Layout& layout,
                    const KeySet& keys) {
  const auto scr = eligibility(image, pairs, layout, keys.per_plane);
  std::vector<PixelPlane> planes;
  for (std::size_t p = 0; p < image.plane_count(); ++p) {
    auto plane = image.plane(p);
    for (std::size_t r = 0; r < layout.regions.size(); ++r) {
      plane = unscramble_blocks(plane, layout.grid, scr[p].scr[r],
                                KeyStream(keys.scramble_key(p), layout.scramble_tag(r)));
    }
    planes.push_back(std::move(plane));
  }
  Image unscrambled = Image::from_planes(std::move(planes));
  // Rotation eligibility refers to the original block positions.
  const auto rot = eligibility(unscrambled, pairs, layout, keys.per_plane);
  for (std::size_t p = 0; p < unscrambled.plane_count(); ++p) {
    unscrambled.plane(p) = unrotate_blocks(unscrambled.plane(p), layout.grid, rot[p].rot,
                                           KeyStream(keys.orient_key(p), kOrientTag));
  }
  return unscrambled;
}

// Splits `payload` over planes in order, filling each up to its capacity.
std::vector<BitString> apportion(const BitString& payload, const std::vector<std::size_t>& caps,
                                 const char* what) {
  const std::size_t total = std::accumulate(caps.begin(), caps.end(), std::size_t{0});
  if (payload.size() > total) {
    throw CapacityExceeded(std::string("CapacityExceeded: ") + std::to_string(payload.size()) +
                           " payload bits exceed " + what + " capacity of " +
                           std::to_string(total) + " bits");
  }
  std::vector<BitString> parts;
  std::size_t offset = 0;
  for (const auto cap : caps) {
    const std::size_t n = std::min(cap, payload.size() - offset);
    parts.emplace_back(payload.begin() + static_cast<std::ptrdiff_t>(offset),
                       payload.begin() + static_cast<std::ptrdiff_t>(offset + n));
    offset += n;
  }
  return parts;
}

struct Prepared {
  std::vector<HistPair> pairs;
  Image intermediate;
};

Prepared prepare(const Image& image) {
  Prepared prep;
  std::vector<PixelPlane> planes;
  for (const auto& plane : image.planes()) {
    const auto pair = find_pp_zp(plane);
    prep.pairs.push_back(pair);
    planes.push_back(shift_histogram(plane, pair));
  }
  prep.intermediate = Image::from_planes(std::move(planes));
  return prep;
}

SideInfo make_side(Mode mode, std::size_t block, const KeySet& keys,
                   const std::vector<HistPair>& pairs) {
  SideInfo side;
  side.mode = mode;
  side.block_w = static_cast<std::uint16_t>(block);
  side.block_h = static_cast<std::uint16_t>(block);
  side.per_plane = keys.per_plane;
  for (const auto& pair : pairs) {
    side.planes.push_back({pair, std::vector<std::uint32_t>(side.region_count(), 0)});
  }
  return side;
}

void check_block(std::size_t block) {
  if (block == 0 || block > 0xFFFF) throw GeometryError("invalid block size " + std::to_string(block));
}

// Embeds parts[p] into region `region` of every plane, planning on `image` itself.
Image embed_region(const Image& image, const std::vector<HistPair>& pairs, const Layout& layout,
                   std::size_t region, const std::vector<BitString>& parts, SideInfo& side) {
  std::vector<PixelPlane> planes;
  for (std::size_t p = 0; p < image.plane_count(); ++p) {
    const auto plan = build_order_plan(image.plane(p), pairs[p], layout.grid, layout.regions[region]);
    planes.push_back(embed_bits(image.plane(p), pairs[p], plan.slots(), parts[p]));
    side.planes[p].payload_bits[region] = static_cast<std::uint32_t>(parts[p].size());
  }
  return Image::from_planes(std::move(planes));
}

std::vector<std::size_t> region_caps(const Image& image, const std::vector<HistPair>& pairs,
                                     const Layout& layout, std::size_t region) {
  std::vector<std::size_t> caps;
  for (std::size_t p = 0; p < image.plane_count(); ++p) {
    caps.push_back(
        build_order_plan(image.plane(p), pairs[p], layout.grid, layout.regions[region]).capacity());
  }
  return caps;
}

// Extracts every region from `image` (marked state) and restores the original histogram.
std::vector<BitString> extract_regions(const Image& image, const SideInfo& side, const Layout& layout,
                                       Image& restored) {
  const auto pairs = pairs_of(side);
  std::vector<BitString> payloads(layout.regions.size());
  std::vector<PixelPlane> planes;
  for (std::size_t p = 0; p < image.plane_count(); ++p) {
    const auto view = plan_view(image.plane(p), pairs[p]);
    if (capacity(view, pairs[p]) + histogram(view)[pairs[p].carrier()] == 0) {
      throw IntegrityError("plane " + std::to_string(p) + " has no pixel at pp " +
                           std::to_string(pairs[p].pp()) + ": side info does not match image");
    }
    PixelPlane plane = image.plane(p);
    for (std::size_t r = 0; r < layout.regions.size(); ++r) {
      const auto plan = build_order_plan(plane, pairs[p], layout.grid, layout.regions[r]);
      const auto slots = plan.slots();
      const std::size_t declared = side.planes[p].payload_bits[r];
      if (declared > slots.size()) {
        throw IntegrityError("plane " + std::to_string(p) + " declares " + std::to_string(declared) +
                             " payload bits but holds only " + std::to_string(slots.size()) +
                             " slots");
      }
      auto extracted = extract_bits(plane, pairs[p], slots);
      payloads[r].insert(payloads[r].end(), extracted.bits.begin(),
                         extracted.bits.begin() + static_cast<std::ptrdiff_t>(declared));
      plane = std::move(extracted.plane);
    }
    planes.push_back(unshift_histogram(plane, pairs[p]));
  }
  restored = Image::from_planes(std::move(planes));
  return payloads;
}

}  // namespace

Embedded embed_plain_then_encrypt(const Image& image, const BitString& payload, const KeySet& keys,
                                  std::size_t block) {
  check_block(block);
  const auto layout = make_layout(image, block, block, std::nullopt);
  auto prep = prepare(image);
  const auto parts = apportion(payload, region_caps(prep.intermediate, prep.pairs, layout, 0), "total");
  auto side = make_side(Mode::PlainFirst, block, keys, prep.pairs);
  const auto marked = embed_region(prep.intermediate, prep.pairs, layout, 0, parts, side);
  return {encrypt_image(marked, prep.pairs, layout, keys), side};
}

Embedded encrypt_then_embed(const Image& image, const BitString& payload, const KeySet& keys,
                            std::size_t block) {
  check_block(block);
  const auto layout = make_layout(image, block, block, std::nullopt);
  auto prep = prepare(image);
  const auto parts = apportion(payload, region_caps(prep.intermediate, prep.pairs, layout, 0), "total");
  auto side = make_side(Mode::EncryptFirst, block, keys, prep.pairs);
  const auto encrypted = encrypt_image(prep.intermediate, prep.pairs, layout, keys);
  return {embed_region(encrypted, prep.pairs, layout, 0, parts, side), side};
}

Extracted extract_from_encrypted(const Image& image, const SideInfo& side) {
  if (side.mode == Mode::TwoDomain) {
    throw Error("two-domain side info: use extract_two_domain with the region key");
  }
  const auto layout = layout_for(image, side, std::nullopt);
  Extracted out;
  auto payloads = extract_regions(image, side, layout, out.image);
  out.payload = std::move(payloads[0]);
  return out;
}

Image decrypt(const Image& image, const SideInfo& side, const KeySet& keys) {
  const auto layout = layout_for(image, side, keys.region);
  if (keys.per_plane != side.per_plane) {
    throw IntegrityError("key mode (per-plane vs joint) does not match side info");
  }
  return decrypt_image(image, pairs_of(side), layout, keys);
}

Embedded embed_two_domain(const Image& image, const BitString& payload_a,
                          const BitString& payload_b, const KeySet& keys, std::size_t block) {
  check_block(block);
  if (!keys.region) throw Error("two-domain embedding requires a region key");
  const auto layout = make_layout(image, block, block, keys.region);
  auto prep = prepare(image);
  const auto parts_a =
      apportion(payload_a, region_caps(prep.intermediate, prep.pairs, layout, 0), "region A");
  const auto parts_b =
      apportion(payload_b, region_caps(prep.intermediate, prep.pairs, layout, 1), "region B");
  auto side = make_side(Mode::TwoDomain, block, keys, prep.pairs);

  const auto marked_a = embed_region(prep.intermediate, prep.pairs, layout, 0, parts_a, side);
  const auto encrypted = encrypt_image(marked_a, prep.pairs, layout, keys);
  return {embed_region(encrypted, prep.pairs, layout, 1, parts_b, side), side};
}

TwoDomainExtracted extract_two_domain(const Image& image, const SideInfo& side,
                                      const Key& region_key) {
  if (side.mode != Mode::TwoDomain) throw Error("side info is not two-domain");
  const auto layout = layout_for(image, side, region_key);
  TwoDomainExtracted out;
  auto payloads = extract_regions(image, side, layout, out.image);
  out.payload_a = std::move(payloads[0]);
  out.payload_b = std::move(payloads[1]);
  return out;
}

namespace {

CapacityInfo capacity_over(const Image& image, const Layout& layout, std::size_t region) {
  auto prep = prepare(image);
  CapacityInfo info;
  info.per_plane = region_caps(prep.intermediate, prep.pairs, layout, region);
  info.total = std::accumulate(info.per_plane.begin(), info.per_plane.end(), std::size_t{0});
  return info;
}

}  // namespace

CapacityInfo embedding_capacity(const Image& image, std::size_t block) {
  check_block(block);
  return capacity_over(image, make_layout(image, block, block, std::nullopt), 0);
}

CapacityInfo region_capacity(const Image& image, const Key& region_key, std::uint8_t label,
                             std::size_t block) {
  check_block(block);
  if (label > 1) throw std::invalid_argument("region label must be 0 (A) or 1 (B)");
  return capacity_over(image, make_layout(image, block, block, region_key), label);
}

BitString bits_from_bytes(std::span<const std::uint8_t> bytes) {
  BitString bits;
  bits.reserve(bytes.size() * 8);
  for (const auto b : bytes) {
    for (int i = 7; i >= 0; --i) bits.push_back((b >> i) & 1);
  }
  return bits;
}

std::vector<std::uint8_t> bytes_from_bits(const BitString& bits) {
  std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) bytes[i / 8] |= static_cast<std::uint8_t>(0x80 >> (i % 8));
  }
  return bytes;
}

}  // namespace etrdh
