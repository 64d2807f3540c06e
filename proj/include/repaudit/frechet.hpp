#pragma once

// Frechet distance between Gaussian fits of two feature distributions.

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

#include "repaudit/embedding_format.hpp"

namespace repaudit {

struct GaussianStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;  // unbiased, symmetrized
  std::size_t count = 0;

  Eigen::Index dim() const { return mean.size(); }
};

// One-pass (Welford) mean and co-moment accumulation; divisor count - 1.
GaussianStats gaussian_stats(const EmbeddingSet& set);

// Builds stats from explicit moments; validates and symmetrizes.
GaussianStats make_stats(Eigen::VectorXd mean, Eigen::MatrixXd cov, std::size_t count);

struct PsdSqrt {
  Eigen::MatrixXd root;
  int clamped = 0;  // negative eigenvalues replaced by zero
};

// Tolerance on |a - a^T|, scaled by max(1, max|a|).
inline constexpr double kSymmetryTolerance = 1e-8;

PsdSqrt matrix_sqrt_psd(const Eigen::MatrixXd& a);

struct FrechetOptions {
  // Added to both covariance diagonals before the square roots.
  double diagonal_epsilon = 0.0;
};

struct FvdResult {
  double value = 0.0;
  double mean_term = 0.0;
  double trace_term = 0.0;
  int eigen_clamped = 0;
  std::vector<std::string> warnings;
};

FvdResult frechet_distance(const GaussianStats& p, const GaussianStats& q,
                           const FrechetOptions& options = {});

// True unless the tag names a copy-detection descriptor family ("sscd*").
bool is_fvd_feature_family(std::string_view extractor);

// frechet_distance(gaussian_stats(real), gaussian_stats(gen)), with a warning
// when either set has fewer samples than dimensions.
FvdResult fvd(const EmbeddingSet& real, const EmbeddingSet& gen,
              const FrechetOptions& options = {});

// Same as fvd() with the real-side statistics already computed.
FvdResult fvd(const GaussianStats& real_stats, const EmbeddingSet& gen,
              const FrechetOptions& options = {});

}  // namespace repaudit
