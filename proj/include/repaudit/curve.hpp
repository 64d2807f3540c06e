#pragma once

// FVD recomputed as the most replicated generated videos are excluded.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "repaudit/embedding_format.hpp"
#include "repaudit/frechet.hpp"
#include "repaudit/similarity.hpp"

namespace repaudit {

struct CurvePoint {
  double retained_fraction = 1.0;  // (m - removed_count) / m
  std::size_t removed_count = 0;
  double fvd = 0.0;
  double threshold = kDefaultThreshold;
  double min_remaining_top_score = 0.0;
  // Plot abscissa in percent. Rank curves: share of the generated set kept.
  // Flagged curves: share of non-replicated videos among those kept.
  double x_percent = 100.0;
  std::optional<double> requested_step;  // rank curves only
  int eigen_clamped = 0;
};

enum class CurveKind { kRank, kFlagged };

std::string_view to_string(CurveKind kind);

struct Curve {
  CurveKind kind = CurveKind::kRank;
  std::vector<CurvePoint> points;
  double baseline_fvd = 0.0;
  std::size_t gen_set_size = 0;
  std::size_t flagged_count = 0;
  // Generated ids in removal order, as far as the deepest point reaches.
  std::vector<std::string> removal_order;
  // Planned flagged-curve points were dropped because they would leave
  // fewer than two generated videos.
  bool truncated = false;

  // max_k |fvd_k - baseline| / baseline; empty when baseline is zero.
  std::optional<double> flatness() const;
};

// Default rank sweep: 1.00 down to 0.50 in steps of 0.05.
std::vector<double> default_curve_steps();

// Throws kInvalidArgument unless steps start at 1.0, lie in (0, 1] and
// strictly decrease.
void check_curve_steps(const std::vector<double>& steps);

// Generated ids by top score, highest first; ties by id.
std::vector<std::string> rank_by_replication(const SimilarityReport& report);

// Removed count for a retained fraction: ceil((1 - step) * m).
std::size_t removal_count(double step, std::size_t m);

Curve integrated_curve(const EmbeddingSet& real, const EmbeddingSet& gen,
                       const SimilarityReport& report, const std::vector<double>& steps,
                       const FrechetOptions& options = {});

inline constexpr int kFlaggedCurveSteps = 10;

Curve flagged_curve(const EmbeddingSet& real, const EmbeddingSet& gen,
                    const SimilarityReport& report, const FrechetOptions& options = {});

}  // namespace repaudit
