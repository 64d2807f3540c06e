#include "repaudit/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "repaudit/error.hpp"

namespace repaudit {

std::string_view to_string(CurveKind kind) {
  return kind == CurveKind::kRank ? "rank" : "flagged";
}

std::optional<double> Curve::flatness() const {
  if (baseline_fvd == 0.0) return std::nullopt;
  double worst = 0.0;
  for (const auto& p : points) worst = std::max(worst, std::abs(p.fvd - baseline_fvd));
  return worst / baseline_fvd;
}

std::vector<double> default_curve_steps() {
  std::vector<double> steps;
  for (int k = 20; k >= 10; --k) steps.push_back(k / 20.0);
  return steps;
}

void check_curve_steps(const std::vector<double>& steps) {
  if (steps.empty()) fail(ErrorCode::kInvalidArgument, "curve steps are empty");
  if (steps.front() != 1.0) {
    fail(ErrorCode::kInvalidArgument, "curve steps must start at 1.0");
  }
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (!(steps[k] > 0.0 && steps[k] <= 1.0)) {
      fail(ErrorCode::kInvalidArgument,
           "curve step " + std::to_string(steps[k]) + " outside (0, 1]");
    }
    if (k > 0 && !(steps[k] < steps[k - 1])) {
      fail(ErrorCode::kInvalidArgument, "curve steps must strictly decrease");
    }
  }
}

std::vector<std::string> rank_by_replication(const SimilarityReport& report) {
  if (report.per_gen.empty()) fail(ErrorCode::kEmptySet, "similarity report is empty");
  std::vector<const GenMatch*> order;
  order.reserve(report.per_gen.size());
  for (const auto& g : report.per_gen) order.push_back(&g);
  std::sort(order.begin(), order.end(), [](const GenMatch* a, const GenMatch* b) {
    if (a->top_score != b->top_score) return a->top_score > b->top_score;
    return a->gen_id < b->gen_id;
  });
  std::vector<std::string> ids;
  ids.reserve(order.size());
  for (const auto* g : order) ids.push_back(g->gen_id);
  return ids;
}

std::size_t removal_count(double step, std::size_t m) {
  // The tolerance absorbs representation error such as (1 - 0.7) * 10.
  const double raw = (1.0 - step) * static_cast<double>(m);
  return static_cast<std::size_t>(std::max(0.0, std::ceil(raw - 1e-9)));
}

namespace {

// Ranking translated to row indices of the FVD generated set, plus scores.
struct RankedSet {
  std::vector<std::size_t> order;  // gen row indices, most replicated first
  std::vector<double> scores;      // top score per gen row
};

RankedSet rank_rows(const EmbeddingSet& gen, const SimilarityReport& report) {
  if (report.per_gen.size() != gen.count()) {
    fail(ErrorCode::kInvalidArgument,
         "similarity report covers " + std::to_string(report.per_gen.size()) +
             " generated videos, feature set has " + std::to_string(gen.count()));
  }
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < gen.count(); ++i) row_of.emplace(gen.ids[i], i);

  RankedSet ranked;
  ranked.scores.assign(gen.count(), 0.0);
  std::vector<bool> seen(gen.count(), false);
  for (const auto& g : report.per_gen) {
    auto it = row_of.find(g.gen_id);
    if (it == row_of.end() || seen[it->second]) {
      fail(ErrorCode::kInvalidArgument,
           "generated id '" + g.gen_id + "' does not match the feature set");
    }
    seen[it->second] = true;
    ranked.scores[it->second] = g.top_score;
  }
  for (const auto& id : rank_by_replication(report)) ranked.order.push_back(row_of.at(id));
  return ranked;
}

class CurveBuilder {
 public:
  CurveBuilder(const EmbeddingSet& real, const EmbeddingSet& gen,
               const SimilarityReport& report, const FrechetOptions& options)
      : gen_(gen),
        ranked_(rank_rows(gen, report)),
        real_stats_(gaussian_stats(real)),
        options_(options),
        threshold_(report.threshold) {
    if (real.dim != gen.dim) {
      fail(ErrorCode::kDimensionMismatch, "real and generated feature dims differ");
    }
  }

  std::size_t size() const { return gen_.count(); }
  const RankedSet& ranked() const { return ranked_; }

  // FVD with the `removed` most replicated videos excluded. Survivors keep
  // their original order, so removed == 0 reproduces fvd(real, gen) exactly.
  CurvePoint point(std::size_t removed) const {
    const std::size_t m = size();
    std::vector<bool> drop(m, false);
    for (std::size_t k = 0; k < removed; ++k) drop[ranked_.order[k]] = true;
    std::vector<std::size_t> keep;
    double min_score = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (drop[i]) continue;
      keep.push_back(i);
      min_score = std::min(min_score, ranked_.scores[i]);
    }
    const FvdResult r = fvd(real_stats_, gen_.subset(keep), options_);
    CurvePoint p;
    p.removed_count = removed;
    p.retained_fraction = static_cast<double>(m - removed) / static_cast<double>(m);
    p.x_percent = 100.0 * p.retained_fraction;
    p.fvd = r.value;
    p.threshold = threshold_;
    p.min_remaining_top_score = min_score;
    p.eigen_clamped = r.eigen_clamped;
    return p;
  }

  std::vector<std::string> removal_order(std::size_t depth) const {
    std::vector<std::string> ids;
    for (std::size_t k = 0; k < depth; ++k) ids.push_back(gen_.ids[ranked_.order[k]]);
    return ids;
  }

 private:
  const EmbeddingSet& gen_;
  RankedSet ranked_;
  GaussianStats real_stats_;
  FrechetOptions options_;
  double threshold_;
};

}  // namespace

Curve integrated_curve(const EmbeddingSet& real, const EmbeddingSet& gen,
                       const SimilarityReport& report, const std::vector<double>& steps,
                       const FrechetOptions& options) {
  check_curve_steps(steps);
  const CurveBuilder builder(real, gen, report, options);
  const std::size_t m = builder.size();

  std::vector<std::size_t> removals;
  for (double step : steps) {
    const std::size_t r = removal_count(step, m);
    if (r > m || m - r < 2) {
      fail(ErrorCode::kInsufficientSamples,
           "step " + std::to_string(step) + " would leave fewer than 2 of " +
               std::to_string(m) + " generated videos");
    }
    removals.push_back(r);
  }

  Curve curve;
  curve.kind = CurveKind::kRank;
  curve.gen_set_size = m;
  curve.flagged_count = 0;
  for (double s : builder.ranked().scores) {
    if (s >= report.threshold) ++curve.flagged_count;
  }
  for (std::size_t k = 0; k < steps.size(); ++k) {
    CurvePoint p = builder.point(removals[k]);
    p.requested_step = steps[k];
    curve.points.push_back(p);
  }
  curve.baseline_fvd = curve.points.front().fvd;
  curve.removal_order = builder.removal_order(removals.back());
  return curve;
}

Curve flagged_curve(const EmbeddingSet& real, const EmbeddingSet& gen,
                    const SimilarityReport& report, const FrechetOptions& options) {
  const CurveBuilder builder(real, gen, report, options);
  const std::size_t m = builder.size();

  std::size_t flagged = 0;
  for (double s : builder.ranked().scores) {
    if (s >= report.threshold) ++flagged;
  }

  Curve curve;
  curve.kind = CurveKind::kFlagged;
  curve.gen_set_size = m;
  curve.flagged_count = flagged;

  auto add = [&](std::size_t removed) {
    CurvePoint p = builder.point(removed);
    p.x_percent = 100.0 * static_cast<double>(m - flagged) /
                  static_cast<double>(m - removed);
    curve.points.push_back(p);
  };

  add(0);
  curve.baseline_fvd = curve.points.front().fvd;
  if (flagged == 0) return curve;

  std::size_t deepest = 0;
  for (int j = 1; j <= kFlaggedCurveSteps; ++j) {
    // round(j * flagged / 10), halves rounded up
    const std::size_t removed =
        (static_cast<std::size_t>(j) * flagged * 2 + kFlaggedCurveSteps) /
        (2 * kFlaggedCurveSteps);
    if (m - removed < 2) {
      curve.truncated = true;
      continue;
    }
    add(removed);
    deepest = removed;
  }
  curve.removal_order = builder.removal_order(deepest);
  return curve;
}

}  // namespace repaudit
