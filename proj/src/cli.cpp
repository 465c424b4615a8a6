#include "etrdh/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <sodium.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "etrdh/analysis.hpp"
#include "etrdh/block_cipher.hpp"
#include "etrdh/error.hpp"
#include "etrdh/pipeline.hpp"
#include "etrdh/pnm.hpp"

namespace etrdh::cli {
namespace {

using nlohmann::json;

std::string format_db(double db) {
  if (std::isinf(db)) return "inf";
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(4);
  ss << db;
  return ss.str();
}

void write_json(const std::string& path, const json& doc) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << doc.dump(2) << "\n";
}

void check_block_size(std::size_t block) {
  if (block != 8 && block != 16 && block != 32 && block != 64) {
    throw GeometryError("block size must be one of 8, 16, 32, 64 (got " + std::to_string(block) + ")");
  }
}

BitString read_payload(const std::string& path) {
  if (path.empty()) return {};
  return bits_from_bytes(read_binary_file(path));
}

struct KeygenArgs {
  std::string out;
  std::optional<std::uint64_t> seed;
  bool region = false;
};

int do_keygen(const KeygenArgs& a, std::ostream& out) {
  if (sodium_init() < 0) throw Error("libsodium initialisation failed");
  KeySet keys;
  auto fill = [&](auto&& draw) {
    draw(keys.scramble);
    draw(keys.orient);
    if (a.region) {
      Key k{};
      draw(k);
      keys.region = k;
    }
  };
  if (a.seed) {
    StreamKey seed_key{};
    for (int i = 0; i < 8; ++i) seed_key.key[i] = static_cast<std::uint8_t>(*a.seed >> (8 * i));
    KeyStream stream(seed_key, "keygen");
    fill([&](Key& k) { stream.fill(k); });
  } else {
    fill([](Key& k) { randombytes_buf(k.data(), k.size()); });
  }
  const auto text = format_key_file(keys);
  write_binary_file(a.out, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
  out << "keys=" << (a.region ? 3 : 2) << "\n";
  return kOk;
}

struct EmbedArgs {
  std::string mode = "plain-first";
  std::size_t block = 16;
  std::string key;
  std::string payload;
  std::string payload_b;
  std::string input;
  std::string output;
  std::string sideinfo;
  bool joint_key = false;
};

int do_embed(const EmbedArgs& a, std::ostream& out) {
  check_block_size(a.block);
  auto keys = read_key_file(a.key);
  keys.per_plane = !a.joint_key;
  const auto image = read_image_file(a.input);
  const auto payload = read_payload(a.payload);

  Embedded result;
  if (a.mode == "plain-first") {
    if (!a.payload_b.empty()) throw Error("--payload-b applies to two-domain mode only");
    result = embed_plain_then_encrypt(image, payload, keys, a.block);
  } else if (a.mode == "encrypted-first") {
    if (!a.payload_b.empty()) throw Error("--payload-b applies to two-domain mode only");
    result = encrypt_then_embed(image, payload, keys, a.block);
  } else {
    if (!keys.region) throw Error("two-domain mode needs a key file with a third (region) key");
    result = embed_two_domain(image, payload, read_payload(a.payload_b), keys, a.block);
  }
  write_image_file(a.output, result.image);
  write_side_info_file(a.sideinfo, result.side);

  out << "mode=" << mode_name(result.side.mode) << "\n";
  for (std::size_t r = 0; r < result.side.region_count(); ++r) {
    const char* label = result.side.region_count() == 1 ? "" : (r == 0 ? "_a" : "_b");
    out << "embedded_bits" << label << "=" << result.side.payload_bits(r) << "\n";
  }
  return kOk;
}

struct ExtractArgs {
  std::string sideinfo;
  std::string key;
  std::string input;
  std::string payload_out;
  std::string payload_b_out;
  std::string image_out;
};

int do_extract(const ExtractArgs& a, std::ostream& out) {
  const auto side = read_side_info_file(a.sideinfo);
  const auto image = read_image_file(a.input);
  Image restored;
  if (side.mode == Mode::TwoDomain) {
    if (a.key.empty()) throw Error("two-domain extraction needs --key (region key)");
    const auto keys = read_key_file(a.key);
    if (!keys.region) throw Error("key file has no region key");
    auto result = extract_two_domain(image, side, *keys.region);
    write_binary_file(a.payload_out, bytes_from_bits(result.payload_a));
    if (!a.payload_b_out.empty()) write_binary_file(a.payload_b_out, bytes_from_bits(result.payload_b));
    out << "extracted_bits_a=" << result.payload_a.size() << "\n"
        << "extracted_bits_b=" << result.payload_b.size() << "\n";
    restored = std::move(result.image);
  } else {
    if (!a.payload_b_out.empty()) throw Error("--payload-b-out applies to two-domain side info only");
    auto result = extract_from_encrypted(image, side);
    write_binary_file(a.payload_out, bytes_from_bits(result.payload));
    out << "extracted_bits=" << result.payload.size() << "\n";
    restored = std::move(result.image);
  }
  if (!a.image_out.empty()) write_image_file(a.image_out, restored);
  return kOk;
}

struct DecryptArgs {
  std::string sideinfo;
  std::string key;
  std::string input;
  std::string output;
};

int do_decrypt(const DecryptArgs& a, std::ostream& out) {
  const auto side = read_side_info_file(a.sideinfo);
  auto keys = read_key_file(a.key);
  keys.per_plane = side.per_plane;
  write_image_file(a.output, decrypt(read_image_file(a.input), side, keys));
  out << "decrypted=" << a.output << "\n";
  return kOk;
}

struct AnalyzeArgs {
  std::string metric;
  std::vector<std::string> inputs;
  std::size_t block = 16;
  std::size_t pairs = 2000;
  std::uint64_t seed = 0;
  std::size_t resize_block = 0;
  std::string key;
  std::string json_out;
};

int do_analyze(const AnalyzeArgs& a, std::ostream& out) {
  json doc;
  doc["metric"] = a.metric;
  if (a.metric == "psnr") {
    if (a.inputs.size() != 2) throw Error("psnr needs two images");
    const double db = psnr(read_image_file(a.inputs[0]), read_image_file(a.inputs[1]));
    out << "psnr_db=" << format_db(db) << "\n";
    doc["psnr_db"] = std::isinf(db) ? json("inf") : json(db);
  } else if (a.metric == "capacity") {
    if (a.inputs.size() != 1) throw Error("capacity needs one image");
    check_block_size(a.block);
    const auto image = read_image_file(a.inputs[0]);
    const auto report = capacity_report(image, a.block);
    out << "block=" << report.block << "\n";
    for (std::size_t p = 0; p < report.per_plane.size(); ++p) {
      out << "plane" << p << "=" << report.per_plane[p] << "\n";
    }
    out << "total=" << report.total << "\n";
    doc["block"] = report.block;
    doc["per_plane"] = report.per_plane;
    doc["total"] = report.total;
    if (!a.key.empty()) {
      const auto keys = read_key_file(a.key);
      if (!keys.region) throw Error("key file has no region key");
      const auto ra = region_capacity(image, *keys.region, 0, a.block);
      const auto rb = region_capacity(image, *keys.region, 1, a.block);
      out << "region_a=" << ra.total << "\nregion_b=" << rb.total << "\n";
      doc["region_a"] = ra.total;
      doc["region_b"] = rb.total;
    }
  } else if (a.metric == "correlation") {
    if (a.inputs.size() != 1) throw Error("correlation needs one image");
    auto image = read_image_file(a.inputs[0]);
    if (a.resize_block) image = resize_topleft(image, a.resize_block, a.resize_block);
    const auto report = correlation_report(image, a.pairs, a.seed);
    out << "pairs=" << report.pairs << "\n"
        << "r_horizontal=" << report.r_horizontal << "\n"
        << "r_vertical=" << report.r_vertical << "\n"
        << "r_diagonal=" << report.r_diagonal << "\n";
    doc["pairs"] = report.pairs;
    doc["r_horizontal"] = report.r_horizontal;
    doc["r_vertical"] = report.r_vertical;
    doc["r_diagonal"] = report.r_diagonal;
  }
  write_json(a.json_out, doc);
  return kOk;
}

struct CompressArgs {
  std::string codecs;
  std::string codec;
  std::vector<std::string> inputs;
  std::string json_out;
};

int do_compress(const CompressArgs& a, std::ostream& out) {
  auto codecs = load_codec_config(a.codecs);
  if (!a.codec.empty()) {
    std::erase_if(codecs, [&](const CodecSpec& c) { return c.name != a.codec; });
    if (codecs.empty()) throw Error("codec '" + a.codec + "' not found in " + a.codecs);
  }
  json doc = json::array();
  for (const auto& input : a.inputs) {
    for (const auto& codec : codecs) {
      const auto r = compression_eval(input, codec);
      out << "file=" << input << " codec=" << r.codec << " original_bytes=" << r.original_bytes
          << " compressed_bytes=" << r.compressed_bytes << " ratio=" << r.ratio
          << " verified=" << (r.verified ? "yes" : "no") << "\n";
      doc.push_back({{"file", input},
                     {"codec", r.codec},
                     {"original_bytes", r.original_bytes},
                     {"compressed_bytes", r.compressed_bytes},
                     {"ratio", r.ratio},
                     {"verified", r.verified}});
    }
  }
  write_json(a.json_out, doc);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reversible data hiding in block-scrambled (EtC) images", "etrdh"};
  app.require_subcommand(1);

  KeygenArgs keygen;
  auto* keygen_cmd = app.add_subcommand("keygen", "Write a key file");
  keygen_cmd->add_option("out", keygen.out, "Key file to write")->required();
  keygen_cmd->add_option("--seed", keygen.seed, "Derive keys deterministically from a seed");
  keygen_cmd->add_flag("--region", keygen.region, "Also emit the two-domain region key");

  EmbedArgs embed;
  auto* embed_cmd = app.add_subcommand("embed", "Embed a payload and encrypt");
  embed_cmd->add_option("--mode", embed.mode, "plain-first | encrypted-first | two-domain")
      ->check(CLI::IsMember({"plain-first", "encrypted-first", "two-domain"}));
  embed_cmd->add_option("--block", embed.block, "Block size (8, 16, 32, 64)");
  embed_cmd->add_option("--key", embed.key, "Key file")->required();
  embed_cmd->add_option("--payload", embed.payload, "Payload file (region A in two-domain mode)");
  embed_cmd->add_option("--payload-b", embed.payload_b, "Region B payload file (two-domain)");
  embed_cmd->add_option("--sideinfo", embed.sideinfo, "Side information file to write")->required();
  embed_cmd->add_flag("--joint-key", embed.joint_key, "One key stream shared by all colour planes");
  embed_cmd->add_option("input", embed.input, "Input PGM/PPM")->required();
  embed_cmd->add_option("output", embed.output, "Output PGM/PPM")->required();

  ExtractArgs extract;
  auto* extract_cmd = app.add_subcommand("extract", "Extract the payload (no keys needed)");
  extract_cmd->add_option("--sideinfo", extract.sideinfo, "Side information file")->required();
  extract_cmd->add_option("--key", extract.key, "Key file (two-domain: region key)");
  extract_cmd->add_option("--payload-b-out", extract.payload_b_out, "Region B payload output");
  extract_cmd->add_option("--image-out", extract.image_out, "Write the image with the payload removed");
  extract_cmd->add_option("input", extract.input, "Marked PGM/PPM")->required();
  extract_cmd->add_option("payload_out", extract.payload_out, "Recovered payload file")->required();

  DecryptArgs dec;
  auto* decrypt_cmd = app.add_subcommand("decrypt", "Undo block scrambling and rotation/flip");
  decrypt_cmd->add_option("--sideinfo", dec.sideinfo, "Side information file")->required();
  decrypt_cmd->add_option("--key", dec.key, "Key file")->required();
  decrypt_cmd->add_option("input", dec.input, "Encrypted PGM/PPM")->required();
  decrypt_cmd->add_option("output", dec.output, "Decrypted PGM/PPM")->required();

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Image metrics");
  analyze_cmd->add_option("metric", analyze.metric, "psnr | capacity | correlation")
      ->required()
      ->check(CLI::IsMember({"psnr", "capacity", "correlation"}));
  analyze_cmd->add_option("inputs", analyze.inputs, "Image file(s)")->required();
  analyze_cmd->add_option("--block", analyze.block, "Block size for capacity");
  analyze_cmd->add_option("--pairs", analyze.pairs, "Neighbouring pairs per direction");
  analyze_cmd->add_option("--seed", analyze.seed, "Pair sampling seed");
  analyze_cmd->add_option("--resize-block", analyze.resize_block,
                          "Subsample to the top-left pixel of each block first");
  analyze_cmd->add_option("--key", analyze.key, "Key file; adds two-domain region capacities");
  analyze_cmd->add_option("--json", analyze.json_out, "Also write a JSON report");

  CompressArgs compress;
  auto* compress_cmd = app.add_subcommand("compress-eval", "Compression ratio through external codecs");
  compress_cmd->add_option("--codecs", compress.codecs, "Codec configuration (JSON)")->required();
  compress_cmd->add_option("--codec", compress.codec, "Only run this codec");
  compress_cmd->add_option("--json", compress.json_out, "Also write a JSON report");
  compress_cmd->add_option("inputs", compress.inputs, "Image file(s)")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    for (const auto* sub : app.get_subcommands()) err << sub->help();
    return kUsage;
  }

  try {
    if (keygen_cmd->parsed()) return do_keygen(keygen, out);
    if (embed_cmd->parsed()) return do_embed(embed, out);
    if (extract_cmd->parsed()) return do_extract(extract, out);
    if (decrypt_cmd->parsed()) return do_decrypt(dec, out);
    if (analyze_cmd->parsed()) return do_analyze(analyze, out);
    if (compress_cmd->parsed()) return do_compress(compress, out);
  } catch (const CodecError& e) {
    err << "codec error: " << e.what() << "\n";
    return kCodecFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace etrdh::cli
