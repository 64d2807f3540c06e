#include "repaudit/embedding_format.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_set>

#include "repaudit/error.hpp"
#include "repaudit/io.hpp"

namespace repaudit {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(SetRole role) {
  return role == SetRole::kReal ? "real" : "generated";
}

SetRole parse_role(std::string_view text) {
  if (text == "real") return SetRole::kReal;
  if (text == "generated") return SetRole::kGenerated;
  fail(ErrorCode::kManifestInvalid, "unknown role '" + std::string(text) + "'");
}

EmbeddingSet EmbeddingSet::from_rows(std::string name, SetRole role,
                                     const std::vector<std::vector<float>>& rows,
                                     std::vector<std::string> ids) {
  EmbeddingSet set;
  set.name = std::move(name);
  set.role = role;
  set.dim = rows.empty() ? 0 : rows.front().size();
  set.ids = std::move(ids);
  for (const auto& r : rows) {
    if (r.size() != set.dim) {
      fail(ErrorCode::kInvalidSet, "ragged rows in set '" + set.name + "'");
    }
    set.values.insert(set.values.end(), r.begin(), r.end());
  }
  if (rows.size() != set.ids.size()) {
    fail(ErrorCode::kInvalidSet, "row count differs from id count");
  }
  return set;
}

EmbeddingSet EmbeddingSet::subset(std::span<const std::size_t> indices) const {
  EmbeddingSet out;
  out.name = name;
  out.role = role;
  out.dim = dim;
  out.values.reserve(indices.size() * dim);
  out.ids.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= count()) fail(ErrorCode::kInvalidArgument, "subset index out of range");
    const auto r = row(i);
    out.values.insert(out.values.end(), r.begin(), r.end());
    out.ids.push_back(ids[i]);
  }
  return out;
}

void check_invariants(const EmbeddingSet& set) {
  if (set.ids.empty()) fail(ErrorCode::kEmptySet, "set '" + set.name + "' is empty");
  if (set.dim == 0) fail(ErrorCode::kInvalidSet, "dim must be positive");
  if (set.values.size() != set.ids.size() * set.dim) {
    fail(ErrorCode::kInvalidSet, "value buffer does not match count x dim");
  }
  if (set.ids.size() > std::numeric_limits<std::uint32_t>::max() ||
      set.dim > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorCode::kInvalidSet, "count or dim exceeds u32");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : set.ids) {
    if (!seen.insert(id).second) {
      fail(ErrorCode::kInvalidSet, "duplicate id '" + id + "'");
    }
  }
  for (std::size_t k = 0; k < set.values.size(); ++k) {
    if (!std::isfinite(set.values[k])) {
      fail(ErrorCode::kNonFinite, "non-finite value in video '" +
                                      set.ids[k / set.dim] + "'");
    }
  }
}

void check_manifest(const Manifest& m) {
  if (m.format_version != kFormatVersion) {
    fail(ErrorCode::kVersionMismatch,
         "manifest format_version " + std::to_string(m.format_version));
  }
  if (m.frame_sampling.frames_per_video < 1) {
    fail(ErrorCode::kManifestInvalid, "frames_per_video must be >= 1");
  }
  if (m.sheet_layout) {
    const auto& s = *m.sheet_layout;
    if (s.rows < 1 || s.cols < 1 ||
        static_cast<long long>(s.rows) * s.cols < m.frame_sampling.frames_per_video) {
      fail(ErrorCode::kManifestInvalid,
           "sheet layout cannot hold frames_per_video frames");
    }
  }
}

namespace {

std::array<std::uint8_t, kDigestSize> sha256(std::span<const std::uint8_t> bytes) {
  std::array<std::uint8_t, kDigestSize> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(),
                 nullptr) != 1 ||
      len != kDigestSize) {
    fail(ErrorCode::kNumeric, "SHA-256 computation failed");
  }
  return digest;
}

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * kDigestSize);
  for (std::uint8_t b : sha256(bytes)) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
  return out;
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint32_t v = 0;
  for (int k = 3; k >= 0; --k) v = (v << 8) | b[at + k];
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_embedding_set(const EmbeddingSet& set) {
  check_invariants(set);
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + set.values.size() * 4 + kDigestSize);
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(set.count()));
  put_u32(out, static_cast<std::uint32_t>(set.dim));
  out.push_back(kDtypeF32);
  for (float f : set.values) put_u32(out, std::bit_cast<std::uint32_t>(f));
  const auto payload = std::span(out).subspan(kHeaderSize);
  const auto digest = sha256(payload);
  out.insert(out.end(), digest.begin(), digest.end());
  return out;
}

DecodedPayload decode_embedding_payload(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size() ||
      !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    fail(ErrorCode::kBadMagic, "missing REPA magic");
  }
  if (bytes.size() < kHeaderSize) fail(ErrorCode::kTruncated, "header truncated");
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kFormatVersion) {
    fail(ErrorCode::kVersionMismatch, "unsupported format_version " +
                                          std::to_string(version));
  }
  DecodedPayload out;
  out.count = get_u32(bytes, 8);
  out.dim = get_u32(bytes, 12);
  if (bytes[16] != kDtypeF32) {
    fail(ErrorCode::kUnsupportedDtype, "dtype " + std::to_string(bytes[16]));
  }
  if (out.count == 0) fail(ErrorCode::kEmptySet, "count is zero");
  if (out.dim == 0) fail(ErrorCode::kMalformed, "dim is zero");

  const std::uint64_t payload_size = std::uint64_t{out.count} * out.dim * 4;
  const std::uint64_t expected = kHeaderSize + payload_size + kDigestSize;
  if (bytes.size() < expected) {
    fail(ErrorCode::kTruncated, "expected " + std::to_string(expected) +
                                    " bytes, found " + std::to_string(bytes.size()));
  }
  if (bytes.size() > expected) {
    fail(ErrorCode::kMalformed, "trailing bytes after digest");
  }

  const auto payload = bytes.subspan(kHeaderSize, payload_size);
  const auto stored = bytes.subspan(kHeaderSize + payload_size, kDigestSize);
  const auto computed = sha256(payload);
  if (!std::equal(computed.begin(), computed.end(), stored.begin())) {
    fail(ErrorCode::kChecksumMismatch, "payload digest does not match");
  }
  out.checksum = sha256_hex(payload);

  out.values.resize(payload_size / 4);
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    out.values[k] = std::bit_cast<float>(get_u32(payload, 4 * k));
    if (!std::isfinite(out.values[k])) {
      fail(ErrorCode::kNonFinite, "non-finite value at payload index " +
                                      std::to_string(k));
    }
  }
  return out;
}

json manifest_json(const Manifest& m) {
  json j;
  j["extractor"] = m.extractor;
  j["frame_sampling"] = {{"frames_per_video", m.frame_sampling.frames_per_video},
                         {"strategy", m.frame_sampling.strategy}};
  if (m.sheet_layout) {
    j["sheet_layout"] = {{"rows", m.sheet_layout->rows},
                         {"cols", m.sheet_layout->cols}};
  } else {
    j["sheet_layout"] = nullptr;
  }
  j["source_paths"] = m.source_paths;
  j["checksum"] = m.checksum;
  j["format_version"] = m.format_version;
  return j;
}

json sidecar_json(const EmbeddingSet& set, const Manifest& m) {
  json j = manifest_json(m);
  j["name"] = set.name;
  j["role"] = to_string(set.role);
  j["ids"] = set.ids;
  return j;
}

Manifest manifest_from_json(const json& j) {
  try {
    Manifest m;
    m.extractor = j.at("extractor").get<std::string>();
    const auto& fsamp = j.at("frame_sampling");
    m.frame_sampling.frames_per_video = fsamp.at("frames_per_video").get<int>();
    m.frame_sampling.strategy = fsamp.at("strategy").get<std::string>();
    if (j.contains("sheet_layout") && !j.at("sheet_layout").is_null()) {
      const auto& s = j.at("sheet_layout");
      m.sheet_layout = SheetLayout{s.at("rows").get<int>(), s.at("cols").get<int>()};
    }
    m.source_paths = j.value("source_paths", std::vector<std::string>{});
    m.checksum = j.at("checksum").get<std::string>();
    m.format_version = j.at("format_version").get<std::uint32_t>();
    return m;
  } catch (const json::exception& e) {
    fail(ErrorCode::kManifestInvalid, e.what());
  }
}

fs::path sidecar_path(const fs::path& binary_path) {
  fs::path p = binary_path;
  p.replace_extension(".manifest.json");
  return p;
}

void write_embedding_set(const EmbeddingSet& set, Manifest manifest,
                         const fs::path& path) {
  const auto bytes = encode_embedding_set(set);
  manifest.format_version = kFormatVersion;
  manifest.checksum = sha256_hex(std::span(bytes).subspan(
      kHeaderSize, bytes.size() - kHeaderSize - kDigestSize));
  check_manifest(manifest);
  write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                           bytes.size()));
  write_file_atomic(sidecar_path(path), sidecar_json(set, manifest).dump(2) + "\n");
}

EmbeddingFile read_embedding_set(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  DecodedPayload payload = decode_embedding_payload(bytes);

  const auto side = read_file_bytes(sidecar_path(path));
  json j;
  try {
    j = json::parse(side.begin(), side.end());
  } catch (const json::exception& e) {
    fail(ErrorCode::kManifestInvalid, sidecar_path(path).string() + ": " + e.what());
  }
  EmbeddingFile file;
  file.manifest = manifest_from_json(j);
  check_manifest(file.manifest);
  if (file.manifest.checksum != payload.checksum) {
    fail(ErrorCode::kChecksumMismatch,
         "manifest checksum does not match payload of " + path.string());
  }
  try {
    file.set.name = j.at("name").get<std::string>();
    file.set.role = parse_role(j.at("role").get<std::string>());
    file.set.ids = j.at("ids").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kManifestInvalid, e.what());
  }
  if (file.set.ids.size() != payload.count) {
    fail(ErrorCode::kManifestInvalid, "manifest lists " +
                                          std::to_string(file.set.ids.size()) +
                                          " ids for " + std::to_string(payload.count) +
                                          " vectors");
  }
  file.set.dim = payload.dim;
  file.set.values = std::move(payload.values);
  check_invariants(file.set);
  return file;
}

void validate_pair(const EmbeddingFile& real, const EmbeddingFile& gen) {
  if (real.set.dim != gen.set.dim) {
    fail(ErrorCode::kDimensionMismatch,
         "real dim " + std::to_string(real.set.dim) + " vs generated dim " +
             std::to_string(gen.set.dim));
  }
  if (real.manifest.extractor != gen.manifest.extractor) {
    fail(ErrorCode::kExtractorMismatch, "real extractor '" + real.manifest.extractor +
                                            "' vs generated extractor '" +
                                            gen.manifest.extractor + "'");
  }
}

}  // namespace repaudit
