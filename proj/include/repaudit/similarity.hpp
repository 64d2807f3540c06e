#pragma once

// Copy-similarity scoring between real and generated descriptor sets.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "repaudit/embedding_format.hpp"

namespace repaudit {

inline constexpr double kDefaultThreshold = 0.6;
inline constexpr double kDefaultUniquenessBand = 0.5;

// Cosine similarity clamped to [-1, 1]. Throws kZeroNorm for a zero vector.
double cosine(std::span<const float> u, std::span<const float> v);

struct SimilarityMatrix {
  std::vector<std::string> real_ids;
  std::vector<std::string> gen_ids;
  std::vector<double> values;  // real-major: values[i * cols() + j]

  std::size_t rows() const { return real_ids.size(); }
  std::size_t cols() const { return gen_ids.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * cols() + j]; }
};

SimilarityMatrix similarity_matrix(const EmbeddingSet& real, const EmbeddingSet& gen);

// Largest entry of the matrix.
double top_vsscd(const SimilarityMatrix& mat);

struct GenMatch {
  std::string gen_id;
  std::string best_real_id;
  double top_score = 0.0;
};

struct RealMatch {
  std::string real_id;
  std::string best_gen_id;
  double top_score = 0.0;
};

struct SimilarityReport {
  std::vector<GenMatch> per_gen;
  double top_vsscd = 0.0;
  double average_top = 0.0;
  std::vector<std::string> replicated_ids;  // top_score >= threshold
  double threshold = kDefaultThreshold;

  // Secondary flag level: generated videos at or above the uniqueness band.
  double uniqueness_band = kDefaultUniquenessBand;
  std::vector<std::string> band_ids;

  // Reverse direction: each real video's closest generated video.
  std::vector<RealMatch> per_real;
  double average_top_per_real = 0.0;

  double fraction_flagged() const {
    return per_gen.empty() ? 0.0
                           : static_cast<double>(replicated_ids.size()) /
                                 static_cast<double>(per_gen.size());
  }
};

SimilarityReport score(const SimilarityMatrix& mat, double threshold,
                       double uniqueness_band = kDefaultUniquenessBand);

SimilarityReport score(const EmbeddingSet& real, const EmbeddingSet& gen,
                       double threshold = kDefaultThreshold,
                       double uniqueness_band = kDefaultUniquenessBand);

}  // namespace repaudit
