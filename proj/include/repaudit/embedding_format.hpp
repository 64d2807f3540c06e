#pragma once

// On-disk format for per-video descriptor sets.
//
// Binary layout (little-endian throughout):
//   magic "REPA" (4) | format_version u32 | count u32 | dim u32 | dtype u8
//   | count*dim f32 payload (vector-major) | SHA-256 of payload (32)
//
// Each binary file has a JSON sidecar (`<stem>.manifest.json`) carrying the
// extractor manifest plus the set name, role and video ids.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace repaudit {

inline constexpr std::array<char, 4> kMagic = {'R', 'E', 'P', 'A'};
inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::uint8_t kDtypeF32 = 0;
inline constexpr std::size_t kHeaderSize = 17;
inline constexpr std::size_t kDigestSize = 32;

enum class SetRole { kReal, kGenerated };

std::string_view to_string(SetRole role);
SetRole parse_role(std::string_view text);

struct EmbeddingSet {
  std::string name;
  SetRole role = SetRole::kReal;
  std::size_t dim = 0;
  std::vector<float> values;  // count x dim, row-major
  std::vector<std::string> ids;

  std::size_t count() const { return ids.size(); }
  std::span<const float> row(std::size_t i) const {
    return {values.data() + i * dim, dim};
  }

  static EmbeddingSet from_rows(std::string name, SetRole role,
                                const std::vector<std::vector<float>>& rows,
                                std::vector<std::string> ids);

  // Rows selected by index, in the order given.
  EmbeddingSet subset(std::span<const std::size_t> indices) const;

  bool operator==(const EmbeddingSet&) const = default;
};

// Throws Error(kEmptySet / kInvalidSet / kNonFinite) on violation.
void check_invariants(const EmbeddingSet& set);

struct FrameSampling {
  int frames_per_video = 1;
  std::string strategy = "uniform";
  bool operator==(const FrameSampling&) const = default;
};

struct SheetLayout {
  int rows = 1;
  int cols = 1;
  bool operator==(const SheetLayout&) const = default;
};

struct Manifest {
  std::string extractor;
  FrameSampling frame_sampling;
  std::optional<SheetLayout> sheet_layout;
  std::vector<std::string> source_paths;
  std::string checksum;  // lowercase hex SHA-256 of the payload
  std::uint32_t format_version = kFormatVersion;
  bool operator==(const Manifest&) const = default;
};

void check_manifest(const Manifest& manifest);

struct EmbeddingFile {
  EmbeddingSet set;
  Manifest manifest;
};

std::string sha256_hex(std::span<const std::uint8_t> bytes);

// Full binary image of a set: header, payload and digest.
std::vector<std::uint8_t> encode_embedding_set(const EmbeddingSet& set);

struct DecodedPayload {
  std::uint32_t count = 0;
  std::uint32_t dim = 0;
  std::vector<float> values;
  std::string checksum;
};

// Verifies magic, version, dtype, length and digest, then finiteness.
DecodedPayload decode_embedding_payload(std::span<const std::uint8_t> bytes);

nlohmann::json sidecar_json(const EmbeddingSet& set, const Manifest& manifest);
nlohmann::json manifest_json(const Manifest& manifest);
Manifest manifest_from_json(const nlohmann::json& j);

std::filesystem::path sidecar_path(const std::filesystem::path& binary_path);

// Fills manifest.checksum from the payload before writing the sidecar.
void write_embedding_set(const EmbeddingSet& set, Manifest manifest,
                         const std::filesystem::path& path);

EmbeddingFile read_embedding_set(const std::filesystem::path& path);

// Pair compatibility: equal dims and identical extractor tags.
void validate_pair(const EmbeddingFile& real, const EmbeddingFile& gen);

}  // namespace repaudit
