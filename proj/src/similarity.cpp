#include "repaudit/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "repaudit/error.hpp"

namespace repaudit {

namespace {

double dot(std::span<const float> u, std::span<const float> v) {
  double acc = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    acc += static_cast<double>(u[k]) * static_cast<double>(v[k]);
  }
  return acc;
}

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

// Shared by cosine() and similarity_matrix() so both produce identical bits.
// Taking one square root of the product of squared norms makes identical
// vectors score exactly 1.
double normalized_dot(std::span<const float> u, double uu, std::span<const float> v,
                      double vv) {
  return clamp_unit(dot(u, v) / std::sqrt(uu * vv));
}

std::vector<double> squared_norms(const EmbeddingSet& set) {
  std::vector<double> norms(set.count());
  for (std::size_t i = 0; i < set.count(); ++i) {
    norms[i] = dot(set.row(i), set.row(i));
    if (norms[i] == 0.0) {
      fail(ErrorCode::kZeroNorm, "zero-norm descriptor for video '" + set.ids[i] +
                                     "' in set '" + set.name + "'");
    }
  }
  return norms;
}

}  // namespace

double cosine(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) {
    fail(ErrorCode::kDimensionMismatch,
         std::to_string(u.size()) + " vs " + std::to_string(v.size()));
  }
  const double uu = dot(u, u);
  const double vv = dot(v, v);
  if (uu == 0.0 || vv == 0.0) fail(ErrorCode::kZeroNorm, "zero-norm vector");
  return normalized_dot(u, uu, v, vv);
}

SimilarityMatrix similarity_matrix(const EmbeddingSet& real, const EmbeddingSet& gen) {
  if (real.dim != gen.dim) {
    fail(ErrorCode::kDimensionMismatch, "real dim " + std::to_string(real.dim) +
                                            " vs generated dim " +
                                            std::to_string(gen.dim));
  }
  const auto real_norms = squared_norms(real);
  const auto gen_norms = squared_norms(gen);

  SimilarityMatrix mat;
  mat.real_ids = real.ids;
  mat.gen_ids = gen.ids;
  mat.values.resize(real.count() * gen.count());
  for (std::size_t i = 0; i < real.count(); ++i) {
    for (std::size_t j = 0; j < gen.count(); ++j) {
      mat.values[i * gen.count() + j] =
          normalized_dot(real.row(i), real_norms[i], gen.row(j), gen_norms[j]);
    }
  }
  return mat;
}

double top_vsscd(const SimilarityMatrix& mat) {
  if (mat.values.empty()) fail(ErrorCode::kEmptySet, "similarity matrix is empty");
  return *std::max_element(mat.values.begin(), mat.values.end());
}

SimilarityReport score(const SimilarityMatrix& mat, double threshold,
                       double uniqueness_band) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "threshold must lie in [0, 1]");
  }
  if (!(uniqueness_band >= 0.0 && uniqueness_band <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "uniqueness band must lie in [0, 1]");
  }
  if (mat.values.empty()) fail(ErrorCode::kEmptySet, "similarity matrix is empty");

  SimilarityReport rep;
  rep.threshold = threshold;
  rep.uniqueness_band = uniqueness_band;

  const std::size_t n = mat.rows();
  const std::size_t m = mat.cols();
  double sum = 0.0;
  rep.per_gen.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    // Strict comparison keeps the lowest real index on ties.
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (mat.at(i, j) > mat.at(best, j)) best = i;
    }
    const double s = mat.at(best, j);
    rep.per_gen.push_back({mat.gen_ids[j], mat.real_ids[best], s});
    sum += s;
    if (s >= threshold) rep.replicated_ids.push_back(mat.gen_ids[j]);
    if (s >= uniqueness_band) rep.band_ids.push_back(mat.gen_ids[j]);
  }
  rep.average_top = sum / static_cast<double>(m);
  rep.top_vsscd = std::max_element(rep.per_gen.begin(), rep.per_gen.end(),
                                   [](const GenMatch& a, const GenMatch& b) {
                                     return a.top_score < b.top_score;
                                   })
                      ->top_score;

  double real_sum = 0.0;
  rep.per_real.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < m; ++j) {
      if (mat.at(i, j) > mat.at(i, best)) best = j;
    }
    rep.per_real.push_back({mat.real_ids[i], mat.gen_ids[best], mat.at(i, best)});
    real_sum += mat.at(i, best);
  }
  rep.average_top_per_real = real_sum / static_cast<double>(n);
  return rep;
}

SimilarityReport score(const EmbeddingSet& real, const EmbeddingSet& gen,
                       double threshold, double uniqueness_band) {
  return score(similarity_matrix(real, gen), threshold, uniqueness_band);
}

}  // namespace repaudit
