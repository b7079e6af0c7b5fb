#include <doctest.h>

#include <charconv>
#include <functional>

#include "support/oracles.hpp"
#include "support/toy.hpp"
#include "vrt/artifacts.hpp"
#include "vrt/error.hpp"
#include "vrt/gridio.hpp"

using namespace vrt;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Argument;
}

Container sample_container() {
  Container c;
  c.header = {{"artifact", "test"}, {"note", "x"}};
  const std::vector<float> f{1.5f, -2.0f, 3.25e-9f};
  const std::vector<std::uint8_t> u{0, 1, 2, 255};
  const std::vector<std::uint8_t> flags{1, 0, 1, 1, 0, 0, 0, 0, 1};
  c.sections = {f32_section("values", f), u8_section("bytes", u), bits_section("flags", flags)};
  return c;
}

}  // namespace

TEST_CASE("sha-256 known answers") {
  CHECK(sha256_hex(std::string()) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex(std::string("abc")) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("bit sections pack least significant bit first") {
  const std::vector<std::uint8_t> flags{1, 0, 1, 1, 0, 0, 0, 0, 7};
  const auto s = bits_section("f", flags);
  CHECK(s.count == 9);
  REQUIRE(s.bytes.size() == 2);
  CHECK(s.bytes[0] == 0x0D);
  CHECK(s.bytes[1] == 0x01);
  CHECK(read_bits(s) == std::vector<std::uint8_t>{1, 0, 1, 1, 0, 0, 0, 0, 1});
}

TEST_CASE("container round trip") {
  const auto c = sample_container();
  const auto bytes = encode_container(c);
  CHECK(std::string(bytes.begin(), bytes.begin() + 8) == "VRTGRID1");
  const auto d = decode_container(bytes);
  CHECK(d.header["artifact"] == "test");
  CHECK(read_f32(d.section("values")) == std::vector<float>{1.5f, -2.0f, 3.25e-9f});
  CHECK(read_u8(d.section("bytes")) == std::vector<std::uint8_t>{0, 1, 2, 255});
  CHECK(read_bits(d.section("flags")).size() == 9);
  CHECK(payload_hash(d) == payload_hash(c));
  CHECK(encode_container(d) == bytes);
  CHECK(kind_of([&] { (void)d.section("missing"); }) == ErrorKind::Parse);
}

TEST_CASE("damaged containers are rejected") {
  const auto bytes = encode_container(sample_container());
  auto tampered = bytes;
  tampered.back() ^= 0x01;
  CHECK(kind_of([&] { decode_container(tampered); }) == ErrorKind::Parse);
  auto truncated = bytes;
  truncated.resize(bytes.size() - 3);
  CHECK(kind_of([&] { decode_container(truncated); }) == ErrorKind::Parse);
  auto magic = bytes;
  magic[0] = 'X';
  CHECK(kind_of([&] { decode_container(magic); }) == ErrorKind::Parse);
  CHECK(kind_of([&] { decode_container(std::vector<std::uint8_t>(4, 0)); }) == ErrorKind::Parse);
}

TEST_CASE("file errors are I/O errors") {
  const auto dir = oracle_ref::scratch_dir("io");
  CHECK(kind_of([&] { read_container(dir / "absent.vrtg"); }) == ErrorKind::Io);
  write_text_file(dir / "plain", "x");
  CHECK(kind_of([&] { write_container(dir / "plain" / "inside.vrtg", sample_container()); }) == ErrorKind::Io);
  // Missing parent directories are created.
  write_container(dir / "a" / "b" / "nested.vrtg", sample_container());
  CHECK(read_container(dir / "a" / "b" / "nested.vrtg").sections.size() == 3);
  write_container(dir / "ok.vrtg", sample_container());
  CHECK(read_container(dir / "ok.vrtg").header["note"] == "x");
}

TEST_CASE("numbers print in shortest round-trip form") {
  for (double v : {0.1, 1e-8, 122.0, 4.503e-6, 1.0 / 3.0}) {
    const auto s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(200.0) == "200");
}

TEST_CASE("typed artifacts round trip") {
  const auto cfg = toy::config();
  const auto kernel = build_kernel(cfg.kernel);
  const auto problem = make_risk_problem(cfg);
  const auto volume = make_risk_volume(problem, cumulative_risk_gather(problem, kernel), "cafe");
  const auto terrain = threshold_terrain(volume, 1e-8);
  const auto dir = oracle_ref::scratch_dir("artifacts");

  write_kernel(dir / "k.vrtg", kernel, "cafe");
  const auto k2 = read_kernel(dir / "k.vrtg");
  CHECK(k2.spec() == kernel.spec());
  CHECK(k2.probs() == kernel.probs());

  write_volume(dir / "v.vrtg", volume);
  const auto v2 = read_volume(dir / "v.vrtg");
  CHECK(v2.spec == volume.spec);
  CHECK(v2.values == volume.values);
  CHECK(v2.column_classes == volume.column_classes);
  CHECK(v2.scenario_hash == "cafe");

  write_terrain(dir / "t.vrtg", terrain);
  const auto t2 = read_terrain(dir / "t.vrtg");
  CHECK(t2.excluded == terrain.excluded);
  CHECK(t2.blocked == terrain.blocked);
  CHECK(t2.kind == TerrainKind::Risk);
  CHECK(t2.threshold == terrain.threshold);
  CHECK(t2.scenario_hash == "cafe");

  ScalarField2 field{{{0, 0}, {2, 2}, {3, 2}}, {0, 1, 2, 3, 4, 5.5}};
  write_container(dir / "f.vrtg", field_container(field, "cafe"));
  const auto f2 = read_field(dir / "f.vrtg");
  CHECK(f2.spec == field.spec);
  CHECK(f2.values == field.values);
}

TEST_CASE("artifacts are byte-stable and typed") {
  const auto cfg = toy::config();
  const auto kernel = build_kernel(cfg.kernel);
  const auto a = encode_container(kernel_container(kernel, "h"));
  const auto b = encode_container(kernel_container(build_kernel(cfg.kernel, 3), "h"));
  CHECK(a == b);
  const auto c = kernel_container(kernel, "h");
  CHECK(c.header["artifact"].is_string());
  CHECK(c.header["scenario_sha256"] == "h");
  CHECK(kind_of([&] { terrain_from_container(c); }) == ErrorKind::Parse);
  CHECK(kind_of([&] { volume_from_container(c); }) == ErrorKind::Parse);
}
