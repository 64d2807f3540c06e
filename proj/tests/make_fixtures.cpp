// Regenerates the committed test fixtures: make_fixtures <out_dir>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>

#include "repaudit/augment.hpp"
#include "repaudit/embedding_format.hpp"
#include "repaudit/image_io.hpp"
#include "repaudit/similarity.hpp"

using namespace repaudit;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kDim = 16;

using Rows = std::vector<std::vector<float>>;

std::vector<std::string> ids(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(prefix + (i < 10 ? "0" : "") + std::to_string(i));
  }
  return out;
}

// Draws through uniform bits and Box-Muller so the values do not depend on
// the standard library's distribution implementation.
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : rng_(seed) {}
  float next(double mean, double sd) {
    const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    return static_cast<float>(mean + sd * z);
  }
  std::uint64_t bits() { return rng_(); }

 private:
  std::mt19937_64 rng_;
};

// Heavier weight on one half of the coordinates.
std::vector<float> row(Gaussian& g, bool first_half, double mean = 0.0) {
  std::vector<float> r(kDim);
  for (std::size_t k = 0; k < kDim; ++k) {
    const bool heavy = (k < kDim / 2) == first_half;
    r[k] = g.next(mean, heavy ? 1.0 : 0.1);
  }
  return r;
}

double best_cosine(const Rows& real, const std::vector<float>& v) {
  double best = -1.0;
  for (const auto& r : real) best = std::max(best, cosine(r, v));
  return best;
}

std::vector<float> novel_row(Gaussian& g, const Rows& real) {
  for (;;) {
    auto r = row(g, false);
    if (best_cosine(real, r) < 0.5) return r;
  }
}

Manifest manifest(std::size_t n, const std::string& prefix) {
  Manifest m;
  m.extractor = "synthetic-gaussian";
  m.frame_sampling = {16, "uniform"};
  for (const auto& id : ids(prefix, n)) m.source_paths.push_back("videos/" + id + ".avi");
  return m;
}

void write(const fs::path& dir, const std::string& name, SetRole role, const Rows& rows,
           const std::string& prefix) {
  const auto set = EmbeddingSet::from_rows(name, role, rows, ids(prefix, rows.size()));
  write_embedding_set(set, manifest(rows.size(), prefix), dir / (name + ".repa"));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <out_dir>\n";
    return 2;
  }
  const fs::path dir = argv[1];
  fs::create_directories(dir);
  Gaussian g(20240601);

  Rows real;
  for (int i = 0; i < 24; ++i) real.push_back(row(g, true));
  write(dir, "real", SetRole::kReal, real, "real_");

  // 16 generated: every fourth one an exact copy of a real video.
  Rows gen;
  for (int j = 0; j < 16; ++j) {
    gen.push_back(j % 4 == 1 ? real[(5 * j) % 24] : novel_row(g, real));
  }
  write(dir, "gen", SetRole::kGenerated, gen, "gen_");

  Rows copies(real.begin(), real.begin() + 16);
  write(dir, "gen_copy", SetRole::kGenerated, copies, "copy_");

  // Fresh draws from the real distribution: same law, no shared samples.
  Rows novel;
  for (int j = 0; j < 16; ++j) novel.push_back(row(g, true));
  write(dir, "gen_novel", SetRole::kGenerated, novel, "novel_");

  // Disjoint supports, so every cross cosine is exactly zero.
  Rows ortho_real, ortho_gen;
  for (int i = 0; i < 12; ++i) {
    std::vector<float> a(kDim, 0.0f), b(kDim, 0.0f);
    for (std::size_t k = 0; k < kDim / 2; ++k) {
      a[k] = g.next(0.0, 1.0);
      b[k + kDim / 2] = g.next(0.0, 1.0);
    }
    ortho_real.push_back(a);
    ortho_gen.push_back(b);
  }
  write(dir, "ortho_real", SetRole::kReal, ortho_real, "oreal_");
  write(dir, "ortho_gen", SetRole::kGenerated, ortho_gen, "ogen_");

  FrameImage frame(32, 24);
  for (int y = 0; y < 24; ++y) {
    for (int x = 0; x < 32; ++x) {
      const auto noise = static_cast<std::uint8_t>(g.bits() % 32);
      frame.set(x, y,
                Rgb{static_cast<std::uint8_t>(x * 8), static_cast<std::uint8_t>(y * 10 + noise),
                    static_cast<std::uint8_t>((x * y) % 256)});
    }
  }
  write_png(frame, dir / "frame.png");
  return 0;
}
