#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "repaudit/augment.hpp"

namespace repaudit {

// 8-bit RGB PNG, no ancillary chunks; identical input gives identical bytes.
std::vector<std::uint8_t> encode_png(const FrameImage& img);

// Accepts any PNG libpng can expand to 8-bit RGB (alpha is dropped).
FrameImage decode_png(std::span<const std::uint8_t> bytes);

FrameImage read_png(const std::filesystem::path& path);
void write_png(const FrameImage& img, const std::filesystem::path& path);

}  // namespace repaudit
