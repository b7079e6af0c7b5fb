#include "vrt/gridio.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>

#include <openssl/evp.h>

#include "vrt/error.hpp"

namespace vrt {

namespace {

constexpr char kMagic[8] = {'V', 'R', 'T', 'G', 'R', 'I', 'D', '1'};
constexpr int kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little, "container I/O assumes a little-endian host");

const char* type_name(SectionType t) {
  switch (t) {
    case SectionType::F32: return "f32";
    case SectionType::U8: return "u8";
    case SectionType::Bits: return "bits";
  }
  return "u8";
}

SectionType parse_type(const std::string& s) {
  if (s == "f32") return SectionType::F32;
  if (s == "u8") return SectionType::U8;
  if (s == "bits") return SectionType::Bits;
  fail(ErrorKind::Parse, "unknown section type \"" + s + "\"");
}

std::size_t expected_bytes(SectionType t, std::size_t count) {
  switch (t) {
    case SectionType::F32: return count * 4;
    case SectionType::U8: return count;
    case SectionType::Bits: return (count + 7) / 8;
  }
  return count;
}

}  // namespace

const Section& Container::section(const std::string& name) const {
  for (const auto& s : sections)
    if (s.name == name) return s;
  fail(ErrorKind::Parse, "container has no section \"" + name + "\"");
}

std::vector<std::uint8_t> Container::payload() const {
  std::vector<std::uint8_t> out;
  for (const auto& s : sections) out.insert(out.end(), s.bytes.begin(), s.bytes.end());
  return out;
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorKind::Io, "SHA-256 computation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

std::string sha256_hex(const std::string& text) {
  return sha256_hex(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<std::uint8_t> encode_container(const Container& container) {
  nlohmann::json header = container.header;
  header["format_version"] = kFormatVersion;
  nlohmann::json sections = nlohmann::json::array();
  std::size_t offset = 0;
  for (const auto& s : container.sections) {
    if (s.bytes.size() != expected_bytes(s.type, s.count))
      fail(ErrorKind::Argument, "section \"" + s.name + "\" byte count does not match its element count");
    sections.push_back({{"name", s.name}, {"type", type_name(s.type)}, {"count", s.count},
                        {"offset", offset}, {"bytes", s.bytes.size()}});
    offset += s.bytes.size();
  }
  header["sections"] = std::move(sections);
  const auto payload = container.payload();
  header["payload_sha256"] = sha256_hex(payload);

  const std::string text = header.dump();
  std::vector<std::uint8_t> out(sizeof kMagic + 8);
  std::memcpy(out.data(), kMagic, sizeof kMagic);
  const std::uint64_t len = text.size();
  std::memcpy(out.data() + sizeof kMagic, &len, 8);
  out.insert(out.end(), text.begin(), text.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Container decode_container(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof kMagic + 8 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    fail(ErrorKind::Parse, "not a grid container (bad magic)");
  std::uint64_t len = 0;
  std::memcpy(&len, bytes.data() + sizeof kMagic, 8);
  const std::size_t body = sizeof kMagic + 8;
  if (len > bytes.size() - body) fail(ErrorKind::Parse, "truncated container header");

  Container c;
  try {
    c.header = nlohmann::json::parse(bytes.begin() + body, bytes.begin() + body + static_cast<std::ptrdiff_t>(len));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("malformed container header: ") + e.what());
  }
  try {
    if (c.header.at("format_version").get<int>() != kFormatVersion)
      fail(ErrorKind::Parse, "unsupported container format version");
    const auto payload = bytes.subspan(body + len);
    if (sha256_hex(payload) != c.header.at("payload_sha256").get<std::string>())
      fail(ErrorKind::Parse, "container payload hash mismatch");
    for (const auto& s : c.header.at("sections")) {
      Section sec;
      sec.name = s.at("name").get<std::string>();
      sec.type = parse_type(s.at("type").get<std::string>());
      sec.count = s.at("count").get<std::size_t>();
      const auto offset = s.at("offset").get<std::size_t>();
      const auto size = s.at("bytes").get<std::size_t>();
      if (size != expected_bytes(sec.type, sec.count) || offset > payload.size() || size > payload.size() - offset)
        fail(ErrorKind::Parse, "section \"" + sec.name + "\" lies outside the payload");
      sec.bytes.assign(payload.begin() + static_cast<std::ptrdiff_t>(offset),
                       payload.begin() + static_cast<std::ptrdiff_t>(offset + size));
      c.sections.push_back(std::move(sec));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("malformed container header: ") + e.what());
  }
  return c;
}

void write_container(const std::filesystem::path& path, const Container& container) {
  write_file_bytes(path, encode_container(container));
}

Container read_container(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_container(bytes);
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

Section f32_section(std::string name, std::span<const float> values) {
  Section s{std::move(name), SectionType::F32, values.size(), std::vector<std::uint8_t>(values.size() * 4)};
  if (!values.empty()) std::memcpy(s.bytes.data(), values.data(), s.bytes.size());
  return s;
}

Section u8_section(std::string name, std::span<const std::uint8_t> values) {
  return {std::move(name), SectionType::U8, values.size(), {values.begin(), values.end()}};
}

Section bits_section(std::string name, std::span<const std::uint8_t> flags) {
  Section s{std::move(name), SectionType::Bits, flags.size(), std::vector<std::uint8_t>((flags.size() + 7) / 8, 0)};
  for (std::size_t i = 0; i < flags.size(); ++i)
    if (flags[i]) s.bytes[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  return s;
}

std::vector<float> read_f32(const Section& section) {
  if (section.type != SectionType::F32) fail(ErrorKind::Parse, "section \"" + section.name + "\" is not f32");
  std::vector<float> out(section.count);
  if (!out.empty()) std::memcpy(out.data(), section.bytes.data(), section.bytes.size());
  return out;
}

std::vector<std::uint8_t> read_u8(const Section& section) {
  if (section.type != SectionType::U8) fail(ErrorKind::Parse, "section \"" + section.name + "\" is not u8");
  return section.bytes;
}

std::vector<std::uint8_t> read_bits(const Section& section) {
  if (section.type != SectionType::Bits) fail(ErrorKind::Parse, "section \"" + section.name + "\" is not a bitfield");
  std::vector<std::uint8_t> out(section.count);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (section.bytes[i / 8] >> (i % 8)) & 1u;
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string() + " for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::Io, "error reading " + path.string());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorKind::Io, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::Io, "error writing " + path.string());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string read_text_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return {bytes.begin(), bytes.end()};
}

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) fail(ErrorKind::Argument, "cannot format number");
  return {buf.data(), end};
}

}  // namespace vrt
