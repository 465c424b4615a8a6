#include "etrdh/analysis.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "etrdh/error.hpp"
#include "etrdh/pipeline.hpp"
#include "etrdh/pnm.hpp"

namespace etrdh {

namespace {

void check_same_shape(const Image& a, const Image& b) {
  if (a.plane_count() != b.plane_count() || a.width() != b.width() || a.height() != b.height()) {
    throw GeometryError("images differ in dimensions or plane count");
  }
}

}  // namespace

double mse(const Image& a, const Image& b) {
  check_same_shape(a, b);
  std::uint64_t sum = 0;
  std::uint64_t n = 0;
  for (std::size_t p = 0; p < a.plane_count(); ++p) {
    const auto x = a.plane(p).samples();
    const auto y = b.plane(p).samples();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const int d = int(x[i]) - int(y[i]);
      sum += static_cast<std::uint64_t>(d * d);
    }
    n += x.size();
  }
  if (n == 0) throw GeometryError("mse: empty images");
  return static_cast<double>(sum) / static_cast<double>(n);
}

double psnr(const Image& a, const Image& b) {
  const double m = mse(a, b);
  if (m == 0) return kPsnrIdentical;
  return 10.0 * std::log10(255.0 * 255.0 / m);
}

Image resize_topleft(const Image& image, std::size_t block_w, std::size_t block_h) {
  const auto grid = split_blocks(image.width(), image.height(), block_w, block_h);
  std::vector<PixelPlane> planes;
  for (const auto& src : image.planes()) {
    PixelPlane out(grid.cols, grid.rows);
    for (std::size_t r = 0; r < grid.rows; ++r) {
      for (std::size_t c = 0; c < grid.cols; ++c) out.at(c, r) = src.at(c * block_w, r * block_h);
    }
    planes.push_back(std::move(out));
  }
  return Image::from_planes(std::move(planes));
}

const char* neighbor_name(Neighbor n) {
  switch (n) {
    case Neighbor::Horizontal: return "horizontal";
    case Neighbor::Vertical: return "vertical";
    case Neighbor::Diagonal: return "diagonal";
  }
  return "unknown";
}

namespace {

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t v = rng();
    if (v < limit) return v % bound;
  }
}

// Floyd's subset sampling: `k` distinct values of [0, n).
std::vector<std::uint64_t> sample_without_replacement(std::uint64_t n, std::uint64_t k,
                                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::unordered_set<std::uint64_t> chosen;
  std::vector<std::uint64_t> out;
  out.reserve(k);
  for (std::uint64_t j = n - k; j < n; ++j) {
    const std::uint64_t t = bounded(rng, j + 1);
    const std::uint64_t pick = chosen.contains(t) ? j : t;
    chosen.insert(pick);
    out.push_back(pick);
  }
  return out;
}

}  // namespace

double correlation(const PixelPlane& plane, Neighbor direction, std::size_t pairs,
                   std::uint64_t seed) {
  const std::size_t dx = direction == Neighbor::Vertical ? 0 : 1;
  const std::size_t dy = direction == Neighbor::Horizontal ? 0 : 1;
  if (plane.width() <= dx || plane.height() <= dy) {
    throw std::invalid_argument("correlation: plane too small");
  }
  const std::size_t aw = plane.width() - dx;
  const std::size_t ah = plane.height() - dy;
  if (pairs == 0 || pairs > aw * ah) {
    throw std::invalid_argument("correlation: " + std::to_string(pairs) + " pairs requested, " +
                                std::to_string(aw * ah) + " anchors available");
  }

  // Integer sums keep the zero-variance test exact.
  std::int64_t sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (const auto anchor : sample_without_replacement(aw * ah, pairs, seed)) {
    const std::size_t x = anchor % aw;
    const std::size_t y = anchor / aw;
    const std::int64_t u = plane.at(x, y);
    const std::int64_t v = plane.at(x + dx, y + dy);
    sx += u;
    sy += v;
    sxx += u * u;
    syy += v * v;
    sxy += u * v;
  }
  const auto s = static_cast<std::int64_t>(pairs);
  // S^2 D(x), S^2 D(y), S^2 cov(x, y)
  const std::int64_t dxx = s * sxx - sx * sx;
  const std::int64_t dyy = s * syy - sy * sy;
  const std::int64_t cxy = s * sxy - sx * sy;
  if (dxx == 0 || dyy == 0) {
    throw DegenerateSample("correlation: zero variance in sampled " +
                           std::string(neighbor_name(direction)) + " pairs");
  }
  return static_cast<double>(cxy) /
         (std::sqrt(static_cast<double>(dxx)) * std::sqrt(static_cast<double>(dyy)));
}

CorrelationReport correlation_report(const Image& image, std::size_t pairs, std::uint64_t seed) {
  CorrelationReport report;
  report.pairs = pairs;
  const double n = static_cast<double>(image.plane_count());
  for (std::size_t p = 0; p < image.plane_count(); ++p) {
    const auto& plane = image.plane(p);
    report.r_horizontal += correlation(plane, Neighbor::Horizontal, pairs, seed + p) / n;
    report.r_vertical += correlation(plane, Neighbor::Vertical, pairs, seed + p) / n;
    report.r_diagonal += correlation(plane, Neighbor::Diagonal, pairs, seed + p) / n;
  }
  return report;
}

CapacityReport capacity_report(const Image& image, std::size_t block) {
  const auto info = embedding_capacity(image, block);
  return {block, info.per_plane, info.total};
}

std::vector<CodecSpec> load_codec_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open codec config " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte);
  }
  const auto dir = std::filesystem::absolute(path).parent_path().string();
  auto resolve = [&](std::string tpl) {
    const std::string key = "{config_dir}";
    for (auto pos = tpl.find(key); pos != std::string::npos; pos = tpl.find(key, pos + dir.size())) {
      tpl.replace(pos, key.size(), dir);
    }
    return tpl;
  };
  std::vector<CodecSpec> codecs;
  try {
    for (const auto& c : doc.at("codecs")) {
      CodecSpec spec;
      spec.name = c.at("name").get<std::string>();
      spec.encode = resolve(c.at("encode").get<std::string>());
      if (c.contains("decode") && !c["decode"].is_null()) {
        spec.decode = resolve(c["decode"].get<std::string>());
      }
      if (c.contains("extension")) spec.extension = c["extension"].get<std::string>();
      codecs.push_back(std::move(spec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return codecs;
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (const char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::string expand(std::string tpl, const std::filesystem::path& in, const std::filesystem::path& out) {
  auto replace_all = [&](const std::string& key, const std::string& value) {
    for (std::size_t pos = tpl.find(key); pos != std::string::npos; pos = tpl.find(key, pos + value.size())) {
      tpl.replace(pos, key.size(), value);
    }
  };
  replace_all("{in}", shell_quote(in.string()));
  replace_all("{out}", shell_quote(out.string()));
  return tpl;
}

void run_command(const std::string& cmd, const std::string& what) {
  const int status = std::system(cmd.c_str());
  if (status != 0) {
    throw CodecError(what + " command failed (status " + std::to_string(status) + "): " + cmd);
  }
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    std::string tpl = (std::filesystem::temp_directory_path() / "etrdh-codec-XXXXXX").string();
    if (!mkdtemp(tpl.data())) throw CodecError("cannot create temporary directory");
    path = tpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace

CompressionResult compression_eval(const std::filesystem::path& image_file, const CodecSpec& codec) {
  const auto original = read_binary_file(image_file);
  TempDir tmp;
  const auto compressed = tmp.path / ("compressed" + codec.extension);
  run_command(expand(codec.encode, image_file, compressed), codec.name + " encode");
  std::error_code ec;
  const auto size = std::filesystem::file_size(compressed, ec);
  if (ec) throw CodecError(codec.name + " encode produced no output file");
  if (size == 0) throw CodecError(codec.name + " encode produced an empty file");

  CompressionResult result;
  result.codec = codec.name;
  result.original_bytes = original.size();
  result.compressed_bytes = static_cast<std::size_t>(size);
  result.ratio = static_cast<double>(original.size()) / static_cast<double>(size);

  if (codec.decode) {
    const auto decoded = tmp.path / "decoded.pnm";
    run_command(expand(*codec.decode, compressed, decoded), codec.name + " decode");
    if (!std::filesystem::exists(decoded)) {
      throw CodecError(codec.name + " decode produced no output file");
    }
    const auto back = read_binary_file(decoded);
    bool same = back == original;
    if (!same) {
      try {
        same = decode_pnm(back) == decode_pnm(original);
      } catch (const ParseError&) {
        same = false;
      }
    }
    if (!same) throw LossyCodec(codec.name + ": decoded image differs from the input");
    result.verified = true;
  }
  return result;
}

}  // namespace etrdh
