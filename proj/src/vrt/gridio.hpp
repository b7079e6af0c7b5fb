#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace vrt {

// Container layout: 8-byte magic "VRTGRID1", little-endian u64 header length,
// UTF-8 JSON header, payload. The header lists payload sections and carries
// the SHA-256 of the payload bytes.

enum class SectionType { F32, U8, Bits };

struct Section {
  std::string name;
  SectionType type = SectionType::U8;
  std::size_t count = 0;  ///< elements (bits for SectionType::Bits)
  std::vector<std::uint8_t> bytes;
};

struct Container {
  nlohmann::json header;
  std::vector<Section> sections;

  const Section& section(const std::string& name) const;
  /// Concatenated section bytes, as stored.
  std::vector<std::uint8_t> payload() const;
};

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(const std::string& text);

std::vector<std::uint8_t> encode_container(const Container& container);
Container decode_container(std::span<const std::uint8_t> bytes);

/// Throws Error(Io) on filesystem failure, Error(Parse) on a malformed or
/// tampered file.
void write_container(const std::filesystem::path& path, const Container& container);
Container read_container(const std::filesystem::path& path);

Section f32_section(std::string name, std::span<const float> values);
Section u8_section(std::string name, std::span<const std::uint8_t> values);
/// Packs nonzero bytes as set bits, LSB first.
Section bits_section(std::string name, std::span<const std::uint8_t> flags);

std::vector<float> read_f32(const Section& section);
std::vector<std::uint8_t> read_u8(const Section& section);
std::vector<std::uint8_t> read_bits(const Section& section);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

/// Shortest round-trip decimal form.
std::string format_double(double value);

}  // namespace vrt
