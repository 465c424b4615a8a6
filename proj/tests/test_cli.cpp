#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "etrdh/cli.hpp"
#include "etrdh/pipeline.hpp"
#include "etrdh/pnm.hpp"
#include "support/generators.hpp"

using namespace etrdh;
using namespace etrdh::testing;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run cli_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("etrdh-cli-" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string operator()(const std::string& name) const { return (dir / name).string(); }
};

std::vector<std::uint8_t> slurp(const std::string& path) { return read_binary_file(path); }

std::string value_of(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  return {};
}

// Writes a payload of whole bytes that fits the capacity of `image_path`.
std::size_t write_payload(Rng& rng, const std::string& image_path, const std::string& path,
                          std::size_t block, double fraction = 1.0) {
  const auto cap = embedding_capacity(read_image_file(image_path), block).total;
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(cap * fraction) / 8);
  for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
  write_binary_file(path, bytes);
  return bytes.size();
}

}  // namespace

TEST_CASE("keygen") {
  Workspace ws;
  REQUIRE(cli_run({"keygen", ws("a.key"), "--seed", "42"}).status == 0);
  REQUIRE(cli_run({"keygen", ws("b.key"), "--seed", "42"}).status == 0);
  REQUIRE(cli_run({"keygen", ws("c.key"), "--seed", "43", "--region"}).status == 0);
  REQUIRE(cli_run({"keygen", ws("d.key")}).status == 0);
  CHECK(slurp(ws("a.key")) == slurp(ws("b.key")));
  CHECK(slurp(ws("a.key")) != slurp(ws("d.key")));
  CHECK_FALSE(read_key_file(ws("a.key")).region.has_value());
  CHECK(read_key_file(ws("c.key")).region.has_value());
}

TEST_CASE("embed, extract and decrypt end to end") {
  Workspace ws;
  Rng rng(21);
  write_image_file(ws("in.ppm"), structured_image(rng, 128, 128, 16, true));
  REQUIRE(cli_run({"keygen", ws("keys.txt"), "--seed", "7"}).status == 0);
  write_payload(rng, ws("in.ppm"), ws("p.bin"), 16);

  for (const std::string mode : {"plain-first", "encrypted-first"}) {
    CAPTURE(mode);
    const auto e = cli_run({"embed", "--mode", mode, "--block", "16", "--key", ws("keys.txt"),
                            "--payload", ws("p.bin"), ws("in.ppm"), ws("out.ppm"), "--sideinfo",
                            ws("out.etrd")});
    REQUIRE(e.status == 0);
    CHECK(value_of(e.out, "mode") == mode);
    CHECK(fs::exists(ws("out.ppm")));
    CHECK(fs::exists(ws("out.etrd")));

    // extract then decrypt
    const auto x = cli_run({"extract", "--sideinfo", ws("out.etrd"), ws("out.ppm"), ws("recovered.bin"),
                            "--image-out", ws("etc.ppm")});
    REQUIRE(x.status == 0);
    CHECK(slurp(ws("recovered.bin")) == slurp(ws("p.bin")));
    REQUIRE(cli_run({"decrypt", "--sideinfo", ws("out.etrd"), "--key", ws("keys.txt"), ws("etc.ppm"),
                     ws("final.ppm")})
                .status == 0);
    CHECK(slurp(ws("final.ppm")) == slurp(ws("in.ppm")));

    // decrypt then extract
    REQUIRE(cli_run({"decrypt", "--sideinfo", ws("out.etrd"), "--key", ws("keys.txt"), ws("out.ppm"),
                     ws("marked.ppm")})
                .status == 0);
    REQUIRE(cli_run({"extract", "--sideinfo", ws("out.etrd"), ws("marked.ppm"), ws("recovered2.bin"),
                     "--image-out", ws("final2.ppm")})
                .status == 0);
    CHECK(slurp(ws("recovered2.bin")) == slurp(ws("p.bin")));
    CHECK(slurp(ws("final2.ppm")) == slurp(ws("in.ppm")));

    const auto q = cli_run({"analyze", "psnr", ws("in.ppm"), ws("marked.ppm")});
    REQUIRE(q.status == 0);
    CHECK(std::stod(value_of(q.out, "psnr_db")) >= 48.13);
  }
}

TEST_CASE("identical invocations give identical outputs") {
  Workspace ws;
  Rng rng(22);
  write_image_file(ws("in.pgm"), structured_image(rng, 64, 64, 8, false));
  REQUIRE(cli_run({"keygen", ws("k"), "--seed", "1"}).status == 0);
  write_payload(rng, ws("in.pgm"), ws("p.bin"), 8, 0.5);
  for (const char* out : {"o1", "o2"}) {
    REQUIRE(cli_run({"embed", "--block", "8", "--key", ws("k"), "--payload", ws("p.bin"), ws("in.pgm"),
                     ws(std::string(out) + ".pgm"), "--sideinfo", ws(std::string(out) + ".etrd")})
                .status == 0);
  }
  CHECK(slurp(ws("o1.pgm")) == slurp(ws("o2.pgm")));
  CHECK(slurp(ws("o1.etrd")) == slurp(ws("o2.etrd")));
}

TEST_CASE("two-domain mode through the CLI") {
  Workspace ws;
  Rng rng(23);
  const auto img = structured_image(rng, 128, 128, 8, true);
  write_image_file(ws("in.ppm"), img);
  REQUIRE(cli_run({"keygen", ws("k"), "--seed", "9", "--region"}).status == 0);
  const auto keys = read_key_file(ws("k"));
  const auto cap_a = region_capacity(img, *keys.region, 0, 8).total;
  const auto cap_b = region_capacity(img, *keys.region, 1, 8).total;
  auto rand_bytes = [&](std::size_t n) {
    std::vector<std::uint8_t> v(n);
    for (auto& b : v) b = static_cast<std::uint8_t>(rng());
    return v;
  };
  write_binary_file(ws("a.bin"), rand_bytes(cap_a / 8));
  write_binary_file(ws("b.bin"), rand_bytes(cap_b / 8));

  const auto cap = cli_run({"analyze", "capacity", ws("in.ppm"), "--block", "8", "--key", ws("k")});
  REQUIRE(cap.status == 0);
  CHECK(value_of(cap.out, "region_a") == std::to_string(cap_a));
  CHECK(value_of(cap.out, "region_b") == std::to_string(cap_b));

  REQUIRE(cli_run({"embed", "--mode", "two-domain", "--block", "8", "--key", ws("k"), "--payload",
                   ws("a.bin"), "--payload-b", ws("b.bin"), ws("in.ppm"), ws("out.ppm"), "--sideinfo",
                   ws("out.etrd")})
              .status == 0);
  CHECK(cli_run({"extract", "--sideinfo", ws("out.etrd"), ws("out.ppm"), ws("ra.bin")}).status == 2);
  REQUIRE(cli_run({"extract", "--sideinfo", ws("out.etrd"), "--key", ws("k"), ws("out.ppm"), ws("ra.bin"),
                   "--payload-b-out", ws("rb.bin"), "--image-out", ws("etc.ppm")})
              .status == 0);
  CHECK(slurp(ws("ra.bin")) == slurp(ws("a.bin")));
  CHECK(slurp(ws("rb.bin")) == slurp(ws("b.bin")));
  REQUIRE(cli_run({"decrypt", "--sideinfo", ws("out.etrd"), "--key", ws("k"), ws("etc.ppm"), ws("final.ppm")})
              .status == 0);
  CHECK(read_image_file(ws("final.ppm")) == img);
}

TEST_CASE("error exit statuses") {
  Workspace ws;
  Rng rng(24);
  write_image_file(ws("in.pgm"), structured_image(rng, 64, 64, 16, false));
  REQUIRE(cli_run({"keygen", ws("k"), "--seed", "3"}).status == 0);
  const auto cap = embedding_capacity(read_image_file(ws("in.pgm")), 16).total;
  write_binary_file(ws("big.bin"), std::vector<std::uint8_t>(cap / 8 + 1, 0xFF));

  SUBCASE("payload larger than capacity") {
    const auto r = cli_run({"embed", "--key", ws("k"), "--payload", ws("big.bin"), ws("in.pgm"),
                            ws("out.pgm"), "--sideinfo", ws("out.etrd")});
    CHECK(r.status == 2);
    CHECK(r.err.find("CapacityExceeded") != std::string::npos);
  }
  SUBCASE("unsupported block size") {
    CHECK(cli_run({"embed", "--block", "24", "--key", ws("k"), ws("in.pgm"), ws("o.pgm"), "--sideinfo",
                   ws("o.etrd")})
              .status == 2);
  }
  SUBCASE("usage errors") {
    CHECK(cli_run({}).status == 1);
    CHECK(cli_run({"frobnicate"}).status == 1);
    CHECK(cli_run({"embed", ws("in.pgm")}).status == 1);
    CHECK(cli_run({"embed", "--mode", "sideways", "--key", ws("k"), ws("in.pgm"), ws("o.pgm"),
                   "--sideinfo", ws("o.etrd")})
              .status == 1);
  }
  SUBCASE("missing and corrupt inputs") {
    CHECK(cli_run({"analyze", "psnr", ws("in.pgm"), ws("nope.pgm")}).status == 2);
    write_binary_file(ws("bad.etrd"), std::vector<std::uint8_t>{'E', 'T', 'R', 'D', 1});
    CHECK(cli_run({"extract", "--sideinfo", ws("bad.etrd"), ws("in.pgm"), ws("x.bin")}).status == 2);
  }
  SUBCASE("codec failure") {
    {
      std::ofstream cfg(ws("codecs.json"));
      cfg << R"({"codecs": [{"name": "broken", "encode": "false"}]})";
    }
    const auto r = cli_run({"compress-eval", "--codecs", ws("codecs.json"), ws("in.pgm")});
    CHECK(r.status == 3);
  }
}

TEST_CASE("analysis subcommands") {
  Workspace ws;
  Rng rng(25);
  const auto img = structured_image(rng, 128, 128, 16, false);
  write_image_file(ws("in.pgm"), img);

  const auto same = cli_run({"analyze", "psnr", ws("in.pgm"), ws("in.pgm")});
  REQUIRE(same.status == 0);
  CHECK(value_of(same.out, "psnr_db") == "inf");

  const auto cap = cli_run({"analyze", "capacity", ws("in.pgm"), "--json", ws("cap.json")});
  REQUIRE(cap.status == 0);
  CHECK(value_of(cap.out, "total") == std::to_string(embedding_capacity(img, 16).total));
  CHECK(fs::exists(ws("cap.json")));

  const auto r = cli_run({"analyze", "correlation", ws("in.pgm"), "--pairs", "500", "--seed", "4"});
  REQUIRE(r.status == 0);
  CHECK(value_of(r.out, "pairs") == "500");
  CHECK_FALSE(value_of(r.out, "r_diagonal").empty());

  {
    std::ofstream cfg(ws("codecs.json"));
    cfg << R"({"codecs": [{"name": "copy", "encode": "cp {in} {out}", "decode": "cp {in} {out}"}]})";
  }
  const auto c = cli_run({"compress-eval", "--codecs", ws("codecs.json"), ws("in.pgm"), "--json", ws("c.json")});
  REQUIRE(c.status == 0);
  CHECK(c.out.find("ratio=1 ") != std::string::npos);
  CHECK(c.out.find("verified=yes") != std::string::npos);
}
