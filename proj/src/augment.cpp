#include "repaudit/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "repaudit/embedding_format.hpp"
#include "repaudit/error.hpp"
#include "repaudit/image_io.hpp"
#include "repaudit/io.hpp"
#include "repaudit/similarity.hpp"

namespace repaudit {

FrameImage::FrameImage(int width, int height, Rgb fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    fail(ErrorCode::kInvalidArgument, "image dimensions must be positive");
  }
  pixels_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t k = 0; k < pixels_.size(); k += 3) {
    pixels_[k] = fill.r;
    pixels_[k + 1] = fill.g;
    pixels_[k + 2] = fill.b;
  }
}

FrameImage::FrameImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 1 || height < 1) {
    fail(ErrorCode::kInvalidArgument, "image dimensions must be positive");
  }
  if (pixels_.size() != static_cast<std::size_t>(width) * height * 3) {
    fail(ErrorCode::kInvalidArgument, "pixel buffer length must be width*height*3");
  }
}

std::size_t FrameImage::offset(int x, int y) const {
  return (static_cast<std::size_t>(y) * width_ + x) * 3;
}

Rgb FrameImage::at(int x, int y) const {
  const auto o = offset(x, y);
  return {pixels_[o], pixels_[o + 1], pixels_[o + 2]};
}

void FrameImage::set(int x, int y, Rgb c) {
  const auto o = offset(x, y);
  pixels_[o] = c.r;
  pixels_[o + 1] = c.g;
  pixels_[o + 2] = c.b;
}

namespace {

// floor(fraction * n), tolerant of products like 0.29 * 100 = 28.999...
int scaled_floor(double fraction, int n) {
  return static_cast<int>(std::floor(fraction * n + 1e-9));
}

bool in_bounds(const FrameImage& img, long x, long y) {
  return x >= 0 && y >= 0 && x < img.width() && y < img.height();
}

}  // namespace

FrameImage flip(const FrameImage& img) {
  FrameImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.set(x, y, img.at(img.width() - 1 - x, y));
  }
  return out;
}

FrameImage crop(const FrameImage& img, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "crop fraction must lie in (0, 1]");
  }
  const int w = img.width();
  const int h = img.height();
  const int cw = scaled_floor(fraction, w);
  const int ch = scaled_floor(fraction, h);
  if (cw < 1 || ch < 1) fail(ErrorCode::kInvalidArgument, "crop is smaller than 1 pixel");
  const int x0 = (w - cw) / 2;
  const int y0 = (h - ch) / 2;
  FrameImage out(w, h);
  for (int y = 0; y < h; ++y) {
    const int sy = y0 + static_cast<int>(static_cast<long>(y) * ch / h);
    for (int x = 0; x < w; ++x) {
      const int sx = x0 + static_cast<int>(static_cast<long>(x) * cw / w);
      out.set(x, y, img.at(sx, sy));
    }
  }
  return out;
}

FrameImage occlude(const FrameImage& img, double rect_fraction) {
  if (!(rect_fraction > 0.0 && rect_fraction < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "occlusion fraction must lie in (0, 1)");
  }
  const int rw = std::max(1, scaled_floor(rect_fraction, img.width()));
  const int rh = std::max(1, scaled_floor(rect_fraction, img.height()));
  const int x0 = (img.width() - rw) / 2;
  const int y0 = (img.height() - rh) / 2;
  FrameImage out = img;
  for (int y = y0; y < y0 + rh; ++y) {
    for (int x = x0; x < x0 + rw; ++x) out.set(x, y, Rgb{});
  }
  return out;
}

FrameImage translate(const FrameImage& img, double dx_fraction, double dy_fraction) {
  if (!(std::abs(dx_fraction) < 1.0 && std::abs(dy_fraction) < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "translation fractions must satisfy |d| < 1");
  }
  const int sx = scaled_floor(dx_fraction, img.width());
  const int sy = scaled_floor(dy_fraction, img.height());
  FrameImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const long src_x = static_cast<long>(x) - sx;
      const long src_y = static_cast<long>(y) - sy;
      if (in_bounds(img, src_x, src_y)) {
        out.set(x, y, img.at(static_cast<int>(src_x), static_cast<int>(src_y)));
      }
    }
  }
  return out;
}

FrameImage rotate(const FrameImage& img, double degrees) {
  if (!(degrees > -180.0 && degrees <= 180.0)) {
    fail(ErrorCode::kInvalidArgument, "rotation angle must lie in (-180, 180]");
  }
  // Quarter turns use exact trigonometry so they stay lossless.
  double c = 0.0;
  double s = 0.0;
  if (degrees == 0.0) {
    c = 1.0;
  } else if (degrees == 90.0) {
    s = 1.0;
  } else if (degrees == -90.0) {
    s = -1.0;
  } else if (degrees == 180.0) {
    c = -1.0;
  } else {
    const double rad = degrees * std::numbers::pi / 180.0;
    c = std::cos(rad);
    s = std::sin(rad);
  }
  const double cx = (img.width() - 1) / 2.0;
  const double cy = (img.height() - 1) / 2.0;
  FrameImage out(img.width(), img.height());
  // Positive angles turn the picture counter-clockwise as displayed (y down).
  // Each output pixel samples the inverse-rotated source position.
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double rx = x - cx;
      const double ry = y - cy;
      const double src_x = c * rx - s * ry + cx;
      const double src_y = s * rx + c * ry + cy;
      const long ix = static_cast<long>(std::floor(src_x + 0.5));
      const long iy = static_cast<long>(std::floor(src_y + 0.5));
      if (in_bounds(img, ix, iy)) {
        out.set(x, y, img.at(static_cast<int>(ix), static_cast<int>(iy)));
      }
    }
  }
  return out;
}

std::string_view to_string(AugmentOp op) {
  switch (op) {
    case AugmentOp::kFlip: return "flip";
    case AugmentOp::kCrop: return "crop";
    case AugmentOp::kOcclusion: return "occlusion";
    case AugmentOp::kTranslation: return "translation";
    case AugmentOp::kRotation: return "rotation";
  }
  return "unknown";
}

AugmentSpec AugmentSpec::crop(double fraction) {
  AugmentSpec s{AugmentOp::kCrop};
  s.crop_fraction = fraction;
  return s;
}

AugmentSpec AugmentSpec::occlusion(double fraction) {
  AugmentSpec s{AugmentOp::kOcclusion};
  s.occlusion_fraction = fraction;
  return s;
}

AugmentSpec AugmentSpec::translation(double dx, double dy) {
  AugmentSpec s{AugmentOp::kTranslation};
  s.shift_x = dx;
  s.shift_y = dy;
  return s;
}

AugmentSpec AugmentSpec::rotation(double degrees) {
  AugmentSpec s{AugmentOp::kRotation};
  s.angle_degrees = degrees;
  return s;
}

nlohmann::json AugmentSpec::params_json() const {
  switch (op) {
    case AugmentOp::kFlip: return nlohmann::json::object();
    case AugmentOp::kCrop: return {{"crop_fraction", crop_fraction}};
    case AugmentOp::kOcclusion: return {{"rect_fraction", occlusion_fraction}};
    case AugmentOp::kTranslation: return {{"dx_fraction", shift_x}, {"dy_fraction", shift_y}};
    case AugmentOp::kRotation: return {{"degrees", angle_degrees}};
  }
  return nlohmann::json::object();
}

void check_spec(const AugmentSpec& spec) {
  switch (spec.op) {
    case AugmentOp::kFlip:
      return;
    case AugmentOp::kCrop:
      if (!(spec.crop_fraction > 0.0 && spec.crop_fraction <= 1.0)) {
        fail(ErrorCode::kInvalidArgument, "crop fraction must lie in (0, 1]");
      }
      return;
    case AugmentOp::kOcclusion:
      if (!(spec.occlusion_fraction > 0.0 && spec.occlusion_fraction < 1.0)) {
        fail(ErrorCode::kInvalidArgument, "occlusion fraction must lie in (0, 1)");
      }
      return;
    case AugmentOp::kTranslation:
      if (!(std::abs(spec.shift_x) < 1.0 && std::abs(spec.shift_y) < 1.0)) {
        fail(ErrorCode::kInvalidArgument, "translation fractions must satisfy |d| < 1");
      }
      return;
    case AugmentOp::kRotation:
      if (!(spec.angle_degrees > -180.0 && spec.angle_degrees <= 180.0)) {
        fail(ErrorCode::kInvalidArgument, "rotation angle must lie in (-180, 180]");
      }
      return;
  }
}

std::vector<AugmentSpec> default_specs() {
  return {AugmentSpec::flip(), AugmentSpec::crop(), AugmentSpec::occlusion(),
          AugmentSpec::translation(), AugmentSpec::rotation()};
}

FrameImage apply(const FrameImage& img, const AugmentSpec& spec) {
  check_spec(spec);
  switch (spec.op) {
    case AugmentOp::kFlip: return flip(img);
    case AugmentOp::kCrop: return crop(img, spec.crop_fraction);
    case AugmentOp::kOcclusion: return occlude(img, spec.occlusion_fraction);
    case AugmentOp::kTranslation: return translate(img, spec.shift_x, spec.shift_y);
    case AugmentOp::kRotation: return rotate(img, spec.angle_degrees);
  }
  fail(ErrorCode::kInvalidArgument, "unknown augmentation");
}

ProbeBundle build_probe(const FrameImage& img, const std::vector<AugmentSpec>& specs,
                        const std::string& stem) {
  if (stem.empty()) fail(ErrorCode::kInvalidArgument, "probe stem is empty");
  std::set<AugmentOp> used;
  for (const auto& spec : specs) {
    check_spec(spec);
    if (!used.insert(spec.op).second) {
      fail(ErrorCode::kInvalidArgument,
           "duplicate augmentation '" + std::string(to_string(spec.op)) + "'");
    }
  }

  ProbeBundle bundle;
  nlohmann::json frames = nlohmann::json::array();
  auto add = [&](const std::string& name, const FrameImage& frame,
                 const nlohmann::json& op_params) {
    ProbeFrame f{name, stem + "_" + name + ".png", encode_png(frame)};
    frames.push_back({{"name", name},
                      {"file", f.file_name},
                      {"params", op_params},
                      {"sha256", sha256_hex(f.png)}});
    bundle.frames.push_back(std::move(f));
  };
  add("orig", img, nlohmann::json::object());
  for (const auto& spec : specs) {
    add(std::string(to_string(spec.op)), apply(img, spec), spec.params_json());
  }

  const nlohmann::json manifest = {
      {"stem", stem},
      {"width", img.width()},
      {"height", img.height()},
      {"resampling", "nearest"},
      {"fill", "black"},
      {"frames", frames},
  };
  bundle.manifest_file_name = stem + "_probe.json";
  bundle.manifest = manifest.dump(2) + "\n";
  return bundle;
}

std::vector<std::filesystem::path> probe_set(const FrameImage& img,
                                             const std::vector<AugmentSpec>& specs,
                                             const std::filesystem::path& out_dir,
                                             const std::string& stem) {
  const ProbeBundle bundle = build_probe(img, specs, stem);
  OutputTransaction tx(out_dir);
  for (const auto& f : bundle.frames) tx.stage(f.file_name, f.png);
  tx.stage(bundle.manifest_file_name, bundle.manifest);
  auto paths = tx.commit();
  paths.pop_back();
  return paths;
}

namespace {

std::string column_name(std::string_view op) {
  std::string name(op);
  name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
  return name;
}

std::vector<float> require_descriptor(const DescriptorProvider& embed,
                                      const std::string& name, const FrameImage* image) {
  auto d = embed(name, image);
  if (!d) fail(ErrorCode::kInvalidArgument, "missing descriptor for variant '" + name + "'");
  return std::move(*d);
}

}  // namespace

std::vector<RobustnessRow> robustness_table(const DescriptorProvider& embed,
                                            const FrameImage& img,
                                            const std::vector<AugmentSpec>& specs,
                                            const FrameImage* unrelated) {
  const auto orig = require_descriptor(embed, "orig", &img);
  std::vector<RobustnessRow> rows;
  rows.push_back({"1:1", cosine(orig, orig)});
  for (const auto& spec : specs) {
    const FrameImage variant = apply(img, spec);
    const std::string name(to_string(spec.op));
    rows.push_back({column_name(name), cosine(orig, require_descriptor(embed, name, &variant))});
  }
  rows.push_back({"Random", cosine(orig, require_descriptor(embed, "random", unrelated))});
  return rows;
}

std::string format_robustness_table(const std::vector<RobustnessRow>& rows) {
  std::string header = "| Frame Operation |";
  std::string rule = "|---|";
  std::string values = "| VSSCD |";
  for (const auto& r : rows) {
    header += " " + r.column + " |";
    rule += "---|";
    values += fmt::format(" {:.4f} |", r.score);
  }
  return header + "\n" + rule + "\n" + values + "\n\n" +
         "Augmented-copy columns: higher means the descriptor still recognises the copy.\n"
         "Random column: lower means unrelated content is kept apart.\n";
}

}  // namespace repaudit
