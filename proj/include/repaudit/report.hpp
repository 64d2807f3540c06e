#pragma once

// Report assembly and serialization (JSON, CSV, Markdown).

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "repaudit/curve.hpp"
#include "repaudit/embedding_format.hpp"
#include "repaudit/frechet.hpp"
#include "repaudit/similarity.hpp"

namespace repaudit {

inline constexpr std::string_view kToolName = "repaudit";
inline constexpr std::string_view kToolVersion = "1.0.0";

nlohmann::json to_json(const SimilarityReport& report);
nlohmann::json to_json(const FvdResult& result);
nlohmann::json to_json(const Curve& curve);

// Columns: gen_id,best_real_id,top_score,replicated
std::string similarity_csv(const SimilarityReport& report);
std::string similarity_markdown(const SimilarityReport& report, const std::string& set_name);

// Columns: retained_fraction,removed_count,fvd,threshold,min_remaining_top_score
std::string curve_csv(const Curve& curve);
// Two columns for plotting: x_percent,fvd
std::string curve_plot_csv(const Curve& curve);

// Shortest round-trip decimal form, as used by every serializer here.
std::string format_number(double v);

enum class ReportFormat { kJson, kCsv, kMarkdown };

std::set<ReportFormat> parse_formats(const std::string& list);
std::string to_string(const std::set<ReportFormat>& formats);

struct AuditConfig {
  double threshold = kDefaultThreshold;
  double uniqueness_band = kDefaultUniquenessBand;
  std::vector<double> curve_steps = default_curve_steps();
  std::string real_path;
  std::string gen_path;
  std::string fvd_real_path;  // empty: same as real_path
  std::string fvd_gen_path;   // empty: same as gen_path
  std::string output_dir;
  std::set<ReportFormat> report_formats = {ReportFormat::kJson, ReportFormat::kCsv,
                                           ReportFormat::kMarkdown};
  double diagonal_epsilon = 0.0;
};

// 0 <= uniqueness_band <= threshold <= 1; curve steps valid.
void check_config(const AuditConfig& config);

nlohmann::json to_json(const AuditConfig& config);

// Fields present in `j` override those in `config`.
void merge_config(AuditConfig& config, const nlohmann::json& j);

struct Verdict {
  double avg_top_vsscd = 0.0;
  double pct_flagged = 0.0;
  double pct_band = 0.0;
  std::optional<double> fvd_at_full_filter;  // empty if full removal is impossible
};

struct AuditInputs {
  EmbeddingFile real;
  EmbeddingFile gen;
  EmbeddingFile fvd_real;
  EmbeddingFile fvd_gen;
};

struct AuditReport {
  SimilarityReport similarity;
  FvdResult fvd_baseline;
  Curve curve;       // threshold-gated removal
  Curve rank_curve;  // rank-gated sweep over config.curve_steps
  Verdict verdict;
  nlohmann::json provenance;
};

// Runs score, fvd and both curves; cross-checks the pieces for consistency.
AuditReport run_audit(const AuditInputs& inputs, const AuditConfig& config);

nlohmann::json to_json(const AuditReport& report);
std::string audit_markdown(const AuditReport& report, const std::string& set_name);

struct NamedAudit {
  std::string name;
  AuditReport report;
};

// One summary row per generated set: VSSCD and FVD side by side.
std::string comparison_markdown(const std::vector<NamedAudit>& audits);
nlohmann::json to_json(const std::vector<NamedAudit>& audits);

}  // namespace repaudit
