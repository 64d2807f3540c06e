#pragma once

// Frame augmentations used to perturb conditioning frames and to check
// descriptor robustness. All resampling is nearest-neighbour; vacated
// regions are filled black; output dimensions always equal input ones.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace repaudit {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

class FrameImage {
 public:
  FrameImage(int width, int height, Rgb fill = {});
  FrameImage(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  std::span<const std::uint8_t> pixels() const { return pixels_; }

  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);

  bool operator==(const FrameImage&) const = default;

 private:
  std::size_t offset(int x, int y) const;

  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;  // row-major RGB
};

FrameImage flip(const FrameImage& img);
FrameImage crop(const FrameImage& img, double fraction);
FrameImage occlude(const FrameImage& img, double rect_fraction);
FrameImage translate(const FrameImage& img, double dx_fraction, double dy_fraction);
FrameImage rotate(const FrameImage& img, double degrees);

enum class AugmentOp { kFlip, kCrop, kOcclusion, kTranslation, kRotation };

std::string_view to_string(AugmentOp op);

struct AugmentSpec {
  AugmentOp op = AugmentOp::kFlip;
  double crop_fraction = 0.8;
  double occlusion_fraction = 0.2;
  double shift_x = 0.1;
  double shift_y = 0.1;
  double angle_degrees = 15.0;

  static AugmentSpec flip() { return {AugmentOp::kFlip}; }
  static AugmentSpec crop(double fraction = 0.8);
  static AugmentSpec occlusion(double fraction = 0.2);
  static AugmentSpec translation(double dx = 0.1, double dy = 0.1);
  static AugmentSpec rotation(double degrees = 15.0);

  // Parameters relevant to `op` only.
  nlohmann::json params_json() const;
};

void check_spec(const AugmentSpec& spec);

// flip, crop, occlusion, translation, rotation with default magnitudes.
std::vector<AugmentSpec> default_specs();

FrameImage apply(const FrameImage& img, const AugmentSpec& spec);

struct ProbeFrame {
  std::string name;  // "orig" or the op name
  std::string file_name;
  std::vector<std::uint8_t> png;
};

// Original plus one frame per spec, PNG encoded, with a JSON manifest of the
// parameters. File names are `<stem>_<name>.png`.
struct ProbeBundle {
  std::vector<ProbeFrame> frames;
  std::string manifest_file_name;
  std::string manifest;
};

ProbeBundle build_probe(const FrameImage& img, const std::vector<AugmentSpec>& specs,
                        const std::string& stem);

// Writes the bundle into out_dir; returns the image paths in order.
std::vector<std::filesystem::path> probe_set(const FrameImage& img,
                                             const std::vector<AugmentSpec>& specs,
                                             const std::filesystem::path& out_dir,
                                             const std::string& stem = "probe");

// Looks up a descriptor by variant name ("orig", "flip", ..., "random");
// `image` is the rendered variant, or empty for "random".
using DescriptorProvider = std::function<std::optional<std::vector<float>>(
    const std::string& name, const FrameImage* image)>;

struct RobustnessRow {
  std::string column;  // "1:1", "Flip", ..., "Random"
  double score = 0.0;
};

std::vector<RobustnessRow> robustness_table(const DescriptorProvider& embed,
                                            const FrameImage& img,
                                            const std::vector<AugmentSpec>& specs,
                                            const FrameImage* unrelated = nullptr);

std::string format_robustness_table(const std::vector<RobustnessRow>& rows);

}  // namespace repaudit
