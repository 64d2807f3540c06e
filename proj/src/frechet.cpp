#include "repaudit/frechet.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "repaudit/error.hpp"

namespace repaudit {

namespace {

void require_finite(const Eigen::MatrixXd& m, const std::string& stage) {
  if (!m.allFinite()) fail(ErrorCode::kNumeric, "non-finite values in " + stage);
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

}  // namespace

GaussianStats gaussian_stats(const EmbeddingSet& set) {
  if (set.count() < 2) {
    fail(ErrorCode::kInsufficientSamples,
         "covariance needs at least 2 samples, set '" + set.name + "' has " +
             std::to_string(set.count()));
  }
  const auto d = static_cast<Eigen::Index>(set.dim);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd comoment = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd x(d);
  Eigen::VectorXd delta(d);
  for (std::size_t n = 1; n <= set.count(); ++n) {
    const auto r = set.row(n - 1);
    for (Eigen::Index k = 0; k < d; ++k) x[k] = r[static_cast<std::size_t>(k)];
    delta = x - mean;
    mean += delta / static_cast<double>(n);
    comoment.noalias() += delta * (x - mean).transpose();
  }
  GaussianStats stats;
  stats.mean = std::move(mean);
  stats.cov = symmetrized(comoment / static_cast<double>(set.count() - 1));
  stats.count = set.count();
  require_finite(stats.cov, "covariance of set '" + set.name + "'");
  return stats;
}

GaussianStats make_stats(Eigen::VectorXd mean, Eigen::MatrixXd cov, std::size_t count) {
  if (count < 2) fail(ErrorCode::kInsufficientSamples, "count must be >= 2");
  if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
    fail(ErrorCode::kDimensionMismatch, "covariance shape does not match mean");
  }
  require_finite(mean, "mean");
  require_finite(cov, "covariance");
  return {std::move(mean), symmetrized(cov), count};
}

PsdSqrt matrix_sqrt_psd(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) fail(ErrorCode::kNotSymmetric, "matrix is not square");
  require_finite(a, "matrix square root input");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
    fail(ErrorCode::kNotSymmetric, "matrix is not symmetric within tolerance");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetrized(a));
  if (eig.info() != Eigen::Success) {
    fail(ErrorCode::kNumeric, "eigendecomposition did not converge");
  }
  PsdSqrt out;
  Eigen::VectorXd roots = eig.eigenvalues();
  for (Eigen::Index k = 0; k < roots.size(); ++k) {
    if (roots[k] < 0.0) {
      roots[k] = 0.0;
      ++out.clamped;
    } else {
      roots[k] = std::sqrt(roots[k]);
    }
  }
  const Eigen::MatrixXd& v = eig.eigenvectors();
  out.root = symmetrized(v * roots.asDiagonal() * v.transpose());
  return out;
}

FvdResult frechet_distance(const GaussianStats& p, const GaussianStats& q,
                           const FrechetOptions& options) {
  if (p.dim() != q.dim()) {
    fail(ErrorCode::kDimensionMismatch, "stats dims " + std::to_string(p.dim()) +
                                            " vs " + std::to_string(q.dim()));
  }
  if (!(options.diagonal_epsilon >= 0.0)) {
    fail(ErrorCode::kInvalidArgument, "diagonal epsilon must be >= 0");
  }
  const auto d = p.dim();
  const Eigen::MatrixXd eps = options.diagonal_epsilon * Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd cov_p = p.cov + eps;
  const Eigen::MatrixXd cov_q = q.cov + eps;

  FvdResult res;
  res.mean_term = (p.mean - q.mean).squaredNorm();
  if (!std::isfinite(res.mean_term)) fail(ErrorCode::kNumeric, "non-finite mean term");

  // (S_p^{1/2} S_q S_p^{1/2})^{1/2} has the same trace as (S_p S_q)^{1/2}.
  const PsdSqrt root_p = matrix_sqrt_psd(cov_p);
  require_finite(root_p.root, "square root of first covariance");
  const Eigen::MatrixXd inner = symmetrized(root_p.root * cov_q * root_p.root);
  require_finite(inner, "covariance product");
  const PsdSqrt root_inner = matrix_sqrt_psd(inner);
  require_finite(root_inner.root, "square root of covariance product");
  res.eigen_clamped = root_p.clamped + root_inner.clamped;

  const double trace = cov_p.trace() + cov_q.trace() - 2.0 * root_inner.root.trace();
  if (!std::isfinite(trace)) fail(ErrorCode::kNumeric, "non-finite trace term");
  res.trace_term = std::max(0.0, trace);
  res.value = res.mean_term + res.trace_term;
  return res;
}

bool is_fvd_feature_family(std::string_view extractor) {
  return !extractor.starts_with("sscd");
}

FvdResult fvd(const GaussianStats& real_stats, const EmbeddingSet& gen,
              const FrechetOptions& options) {
  if (static_cast<std::size_t>(real_stats.dim()) != gen.dim) {
    fail(ErrorCode::kDimensionMismatch, "real dim " + std::to_string(real_stats.dim()) +
                                            " vs generated dim " +
                                            std::to_string(gen.dim));
  }
  FvdResult res = frechet_distance(real_stats, gaussian_stats(gen), options);
  const auto d = gen.dim;
  if (real_stats.count < d) {
    res.warnings.push_back("rank-deficient covariance: real set has " +
                           std::to_string(real_stats.count) + " samples for dim " +
                           std::to_string(d));
  }
  if (gen.count() < d) {
    res.warnings.push_back("rank-deficient covariance: generated set has " +
                           std::to_string(gen.count()) + " samples for dim " +
                           std::to_string(d));
  }
  return res;
}

FvdResult fvd(const EmbeddingSet& real, const EmbeddingSet& gen,
              const FrechetOptions& options) {
  if (real.dim != gen.dim) {
    fail(ErrorCode::kDimensionMismatch, "real dim " + std::to_string(real.dim) +
                                            " vs generated dim " +
                                            std::to_string(gen.dim));
  }
  return fvd(gaussian_stats(real), gen, options);
}

}  // namespace repaudit
