#include "etrdh/scan_order.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "etrdh/error.hpp"

namespace etrdh {

std::vector<std::uint8_t> transform_block(std::span<const std::uint8_t> block, std::size_t n,
                                          Orientation o) {
  std::vector<std::uint8_t> out(block.size());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const auto dst = o.apply(r, c, n);
      out[dst.row * n + dst.col] = block[r * n + c];
    }
  }
  return out;
}

std::size_t BlockMask::count() const {
  return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), std::uint8_t{1}));
}

Signature pp_signature(const BlockMask& mask, Orientation o) {
  Signature sig;
  const std::size_t n = mask.side;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      if (!mask.at(r, c)) continue;
      const auto dst = o.apply(r, c, n);
      sig.push_back(static_cast<std::uint32_t>(dst.row * n + dst.col));
    }
  }
  std::sort(sig.begin(), sig.end());
  return sig;
}

WithinOrder canonical_orientation(const BlockMask& mask) {
  if (mask.count() == 0) throw std::invalid_argument("canonical_orientation: empty mask");
  WithinOrder best{Orientation(0), false, pp_signature(mask, Orientation(0))};
  for (std::uint8_t id = 1; id < Orientation::kCount; ++id) {
    auto sig = pp_signature(mask, Orientation(id));
    if (sig < best.signature) {
      best = {Orientation(id), false, std::move(sig)};
    } else if (sig == best.signature) {
      best.ambiguous = true;
    }
  }
  if (best.ambiguous) best.orientation = Orientation(0);
  return best;
}

std::vector<std::size_t> visiting_order(const BlockMask& mask, Orientation o) {
  const std::size_t n = mask.side;
  std::vector<std::pair<std::size_t, std::size_t>> keyed;  // (index under o, stored offset)
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      if (!mask.at(r, c)) continue;
      const auto dst = o.apply(r, c, n);
      keyed.emplace_back(dst.row * n + dst.col, r * n + c);
    }
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> order;
  order.reserve(keyed.size());
  for (const auto& [ignored, offset] : keyed) order.push_back(offset);
  return order;
}

bool key_precedes(const BlockKey& a, const BlockKey& b) {
  if (a.count != b.count) return a.count > b.count;
  if (a.n_shifted != b.n_shifted) return a.n_shifted < b.n_shifted;
  return a.signature < b.signature;
}

std::vector<AmongEntry> among_block_order(std::span<const KeyedBlock> blocks) {
  std::vector<std::size_t> idx(blocks.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
    const auto& a = blocks[x];
    const auto& b = blocks[y];
    if (key_precedes(a.key, b.key)) return true;
    if (key_precedes(b.key, a.key)) return false;
    return a.index < b.index;
  });

  std::vector<AmongEntry> order(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) order[i].index = blocks[idx[i]].index;
  // Equal keys are adjacent after sorting.
  for (std::size_t i = 1; i < idx.size(); ++i) {
    if (blocks[idx[i]].key == blocks[idx[i - 1]].key) {
      order[i].index_tied = true;
      order[i - 1].index_tied = true;
    }
  }
  return order;
}

std::vector<std::size_t> OrderPlan::slots() const {
  std::vector<std::size_t> out;
  out.reserve(capacity());
  for (const auto a : among) {
    const auto& v = blocks[a].visit;
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

std::size_t OrderPlan::capacity() const {
  std::size_t total = 0;
  for (const auto a : among) total += blocks[a].key.count;
  return total;
}

OrderPlan build_order_plan(const PixelPlane& plane, HistPair pair, const BlockGrid& grid,
                           std::span<const std::size_t> members) {
  if (!grid.square()) throw GeometryError("build_order_plan: blocks must be square");
  if (plane.width() != grid.width() || plane.height() != grid.height()) {
    throw GeometryError("build_order_plan: grid does not match plane");
  }
  const std::size_t n = grid.block_w;

  OrderPlan plan;
  plan.grid = grid;
  plan.blocks.resize(grid.count());

  std::vector<KeyedBlock> marked;
  BlockMask mask{n, std::vector<std::uint8_t>(n * n)};
  for (const auto a : members) {
    if (a >= grid.count()) throw GeometryError("build_order_plan: member index out of range");
    auto& bp = plan.blocks[a];
    bp.member = true;
    const auto samples = read_block(plane, grid, a);
    std::size_t count = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      mask.cells[i] = pair.is_marked(samples[i]) ? 1 : 0;
      count += mask.cells[i];
      bp.key.n_shifted += pair.in_shifted_band(samples[i]) ? 1 : 0;
    }
    bp.key.count = count;
    if (count == 0) continue;

    auto within = canonical_orientation(mask);
    for (const auto offset : visiting_order(mask, within.orientation)) {
      bp.visit.push_back(grid.sample_offset(a, offset % n, offset / n));
    }
    bp.key.signature = within.signature;
    bp.within = std::move(within);
    marked.push_back({a, bp.key});
  }

  for (const auto& entry : among_block_order(marked)) {
    plan.among.push_back(entry.index);
    plan.blocks[entry.index].index_tied = entry.index_tied;
  }

  for (const auto a : members) {
    const auto& bp = plan.blocks[a];
    if (!bp.within || !bp.within->ambiguous) plan.rot_eligible.push_back(a);
    if (!bp.within || !bp.index_tied) plan.scr_eligible.push_back(a);
  }
  std::sort(plan.rot_eligible.begin(), plan.rot_eligible.end());
  std::sort(plan.scr_eligible.begin(), plan.scr_eligible.end());
  return plan;
}

OrderPlan build_order_plan(const PixelPlane& plane, HistPair pair, const BlockGrid& grid) {
  std::vector<std::size_t> all(grid.count());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return build_order_plan(plane, pair, grid, all);
}

}  // namespace etrdh
