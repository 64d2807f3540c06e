#include "repaudit/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "repaudit/error.hpp"

namespace repaudit {

using nlohmann::json;

std::string format_number(double v) { return fmt::format("{}", v); }

namespace {

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string percent(double fraction) { return fmt::format("{:.1f}%", 100.0 * fraction); }

}  // namespace

json to_json(const SimilarityReport& r) {
  json per_gen = json::array();
  for (const auto& g : r.per_gen) {
    per_gen.push_back({{"gen_id", g.gen_id},
                       {"best_real_id", g.best_real_id},
                       {"top_score", g.top_score},
                       {"replicated", g.top_score >= r.threshold}});
  }
  json per_real = json::array();
  for (const auto& p : r.per_real) {
    per_real.push_back({{"real_id", p.real_id},
                        {"best_gen_id", p.best_gen_id},
                        {"top_score", p.top_score}});
  }
  return {{"top_vsscd", r.top_vsscd},
          {"average_top", r.average_top},
          {"threshold", r.threshold},
          {"replicated_ids", r.replicated_ids},
          {"uniqueness_band", r.uniqueness_band},
          {"band_ids", r.band_ids},
          {"per_gen", per_gen},
          {"average_top_per_real", r.average_top_per_real},
          {"per_real", per_real}};
}

json to_json(const FvdResult& r) {
  return {{"value", r.value},
          {"mean_term", r.mean_term},
          {"trace_term", r.trace_term},
          {"eigen_clamped", r.eigen_clamped},
          {"warnings", r.warnings}};
}

json to_json(const Curve& c) {
  json points = json::array();
  for (const auto& p : c.points) {
    json jp = {{"retained_fraction", p.retained_fraction},
               {"removed_count", p.removed_count},
               {"fvd", p.fvd},
               {"threshold", p.threshold},
               {"min_remaining_top_score", p.min_remaining_top_score},
               {"x_percent", p.x_percent},
               {"eigen_clamped", p.eigen_clamped}};
    if (p.requested_step) jp["requested_step"] = *p.requested_step;
    points.push_back(std::move(jp));
  }
  return {{"kind", to_string(c.kind)},
          {"baseline_fvd", c.baseline_fvd},
          {"gen_set_size", c.gen_set_size},
          {"flagged_count", c.flagged_count},
          {"truncated", c.truncated},
          {"flatness", optional_number(c.flatness())},
          {"removal_order", c.removal_order},
          {"points", points}};
}

std::string similarity_csv(const SimilarityReport& r) {
  std::string out = "gen_id,best_real_id,top_score,replicated\n";
  for (const auto& g : r.per_gen) {
    out += fmt::format("{},{},{},{}\n", g.gen_id, g.best_real_id, format_number(g.top_score),
                       g.top_score >= r.threshold ? "true" : "false");
  }
  return out;
}

std::string similarity_markdown(const SimilarityReport& r, const std::string& set_name) {
  std::string out = "# Replication scores: " + set_name + "\n\n";
  out += "| Generated set | Avg top VSSCD | Top-VSSCD | Flagged (>= " +
         format_number(r.threshold) + ") | Band (>= " + format_number(r.uniqueness_band) +
         ") |\n|---|---|---|---|---|\n";
  out += fmt::format("| {} | {:.4f} | {:.4f} | {} / {} ({}) | {} / {} ({}) |\n\n", set_name,
                     r.average_top, r.top_vsscd, r.replicated_ids.size(), r.per_gen.size(),
                     percent(r.fraction_flagged()), r.band_ids.size(), r.per_gen.size(),
                     percent(static_cast<double>(r.band_ids.size()) /
                             static_cast<double>(r.per_gen.size())));
  out += "| Generated video | Closest real video | Top score | Replicated |\n|---|---|---|---|\n";
  for (const auto& g : r.per_gen) {
    out += fmt::format("| {} | {} | {:.4f} | {} |\n", g.gen_id, g.best_real_id, g.top_score,
                       g.top_score >= r.threshold ? "yes" : "no");
  }
  return out;
}

std::string curve_csv(const Curve& c) {
  std::string out = "retained_fraction,removed_count,fvd,threshold,min_remaining_top_score\n";
  for (const auto& p : c.points) {
    out += fmt::format("{},{},{},{},{}\n", format_number(p.retained_fraction), p.removed_count,
                       format_number(p.fvd), format_number(p.threshold),
                       format_number(p.min_remaining_top_score));
  }
  return out;
}

std::string curve_plot_csv(const Curve& c) {
  std::string out = c.kind == CurveKind::kFlagged ? "non_replicated_percent,fvd\n"
                                                  : "retained_percent,fvd\n";
  for (const auto& p : c.points) {
    out += fmt::format("{},{}\n", format_number(p.x_percent), format_number(p.fvd));
  }
  return out;
}

std::set<ReportFormat> parse_formats(const std::string& list) {
  std::set<ReportFormat> formats;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "json") {
      formats.insert(ReportFormat::kJson);
    } else if (item == "csv") {
      formats.insert(ReportFormat::kCsv);
    } else if (item == "md" || item == "markdown") {
      formats.insert(ReportFormat::kMarkdown);
    } else {
      fail(ErrorCode::kInvalidArgument, "unknown report format '" + item + "'");
    }
  }
  if (formats.empty()) fail(ErrorCode::kInvalidArgument, "no report format selected");
  return formats;
}

std::string to_string(const std::set<ReportFormat>& formats) {
  std::vector<std::string> names;
  for (auto f : formats) {
    names.push_back(f == ReportFormat::kJson ? "json" : f == ReportFormat::kCsv ? "csv" : "md");
  }
  return fmt::format("{}", fmt::join(names, ","));
}

void check_config(const AuditConfig& c) {
  if (!(c.uniqueness_band >= 0.0 && c.uniqueness_band <= c.threshold && c.threshold <= 1.0)) {
    fail(ErrorCode::kInvalidArgument,
         "require 0 <= uniqueness_band <= threshold <= 1, got band " +
             format_number(c.uniqueness_band) + " threshold " + format_number(c.threshold));
  }
  check_curve_steps(c.curve_steps);
  if (!(c.diagonal_epsilon >= 0.0)) {
    fail(ErrorCode::kInvalidArgument, "diagonal epsilon must be >= 0");
  }
}

json to_json(const AuditConfig& c) {
  return {{"threshold", c.threshold},
          {"uniqueness_band", c.uniqueness_band},
          {"curve_steps", c.curve_steps},
          {"real", c.real_path},
          {"gen", c.gen_path},
          {"fvd_real", c.fvd_real_path.empty() ? c.real_path : c.fvd_real_path},
          {"fvd_gen", c.fvd_gen_path.empty() ? c.gen_path : c.fvd_gen_path},
          {"out", c.output_dir},
          {"formats", to_string(c.report_formats)},
          {"diagonal_epsilon", c.diagonal_epsilon}};
}

void merge_config(AuditConfig& c, const json& j) {
  if (!j.is_object()) fail(ErrorCode::kInvalidArgument, "config must be a JSON object");
  try {
    if (j.contains("threshold")) c.threshold = j.at("threshold").get<double>();
    if (j.contains("uniqueness_band")) c.uniqueness_band = j.at("uniqueness_band").get<double>();
    if (j.contains("curve_steps")) c.curve_steps = j.at("curve_steps").get<std::vector<double>>();
    if (j.contains("real")) c.real_path = j.at("real").get<std::string>();
    if (j.contains("gen")) c.gen_path = j.at("gen").get<std::string>();
    if (j.contains("fvd_real")) c.fvd_real_path = j.at("fvd_real").get<std::string>();
    if (j.contains("fvd_gen")) c.fvd_gen_path = j.at("fvd_gen").get<std::string>();
    if (j.contains("out")) c.output_dir = j.at("out").get<std::string>();
    if (j.contains("formats")) c.report_formats = parse_formats(j.at("formats").get<std::string>());
    if (j.contains("diagonal_epsilon")) {
      c.diagonal_epsilon = j.at("diagonal_epsilon").get<double>();
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("config: ") + e.what());
  }
}

namespace {

json file_provenance(const std::string& path, const EmbeddingFile& f) {
  return {{"path", path},
          {"name", f.set.name},
          {"role", to_string(f.set.role)},
          {"count", f.set.count()},
          {"dim", f.set.dim},
          {"manifest", manifest_json(f.manifest)}};
}

void cross_check(const AuditReport& r) {
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); };
  double best = -2.0;
  for (const auto& g : r.similarity.per_gen) best = std::max(best, g.top_score);
  if (best != r.similarity.top_vsscd) {
    fail(ErrorCode::kNumeric, "audit inconsistency: top_vsscd differs from per-video maximum");
  }
  if (!near(r.curve.baseline_fvd, r.fvd_baseline.value) ||
      !near(r.rank_curve.baseline_fvd, r.fvd_baseline.value)) {
    fail(ErrorCode::kNumeric, "audit inconsistency: curve baseline differs from FVD");
  }
  if (r.curve.gen_set_size != r.similarity.per_gen.size() ||
      r.curve.flagged_count != r.similarity.replicated_ids.size()) {
    fail(ErrorCode::kNumeric, "audit inconsistency: curve and similarity report disagree");
  }
  if (!near(r.fvd_baseline.value, r.fvd_baseline.mean_term + r.fvd_baseline.trace_term)) {
    fail(ErrorCode::kNumeric, "audit inconsistency: FVD terms do not add up");
  }
}

}  // namespace

AuditReport run_audit(const AuditInputs& in, const AuditConfig& config) {
  check_config(config);
  validate_pair(in.real, in.gen);
  validate_pair(in.fvd_real, in.fvd_gen);
  if (!is_fvd_feature_family(in.fvd_real.manifest.extractor)) {
    fail(ErrorCode::kExtractorMismatch,
         "extractor '" + in.fvd_real.manifest.extractor +
             "' is a copy-detection descriptor, not an FVD feature family");
  }
  const FrechetOptions options{config.diagonal_epsilon};

  AuditReport r;
  r.similarity = score(in.real.set, in.gen.set, config.threshold, config.uniqueness_band);
  r.fvd_baseline = fvd(in.fvd_real.set, in.fvd_gen.set, options);
  r.curve = flagged_curve(in.fvd_real.set, in.fvd_gen.set, r.similarity, options);
  r.rank_curve =
      integrated_curve(in.fvd_real.set, in.fvd_gen.set, r.similarity, config.curve_steps, options);

  const double m = static_cast<double>(r.similarity.per_gen.size());
  r.verdict.avg_top_vsscd = r.similarity.average_top;
  r.verdict.pct_flagged = 100.0 * static_cast<double>(r.similarity.replicated_ids.size()) / m;
  r.verdict.pct_band = 100.0 * static_cast<double>(r.similarity.band_ids.size()) / m;
  const auto& last = r.curve.points.back();
  if (last.removed_count == r.curve.flagged_count) r.verdict.fvd_at_full_filter = last.fvd;

  const json cfg = to_json(config);
  r.provenance = {{"tool", kToolName},
                  {"version", kToolVersion},
                  {"config", cfg},
                  {"inputs",
                   {{"real", file_provenance(cfg.at("real"), in.real)},
                    {"gen", file_provenance(cfg.at("gen"), in.gen)},
                    {"fvd_real", file_provenance(cfg.at("fvd_real"), in.fvd_real)},
                    {"fvd_gen", file_provenance(cfg.at("fvd_gen"), in.fvd_gen)}}}};
  cross_check(r);
  return r;
}

json to_json(const AuditReport& r) {
  return {{"verdict",
           {{"avg_top_vsscd", r.verdict.avg_top_vsscd},
            {"pct_flagged", r.verdict.pct_flagged},
            {"pct_band", r.verdict.pct_band},
            {"fvd_at_full_filter", optional_number(r.verdict.fvd_at_full_filter)}}},
          {"similarity", to_json(r.similarity)},
          {"fvd_baseline", to_json(r.fvd_baseline)},
          {"curve", to_json(r.curve)},
          {"rank_curve", to_json(r.rank_curve)},
          {"provenance", r.provenance}};
}

namespace {

std::string summary_header(const SimilarityReport& s) {
  return "| Generated set | Avg top VSSCD | Top-VSSCD | Flagged (>= " + format_number(s.threshold) +
         ") | Band (>= " + format_number(s.uniqueness_band) +
         ") | FVD | FVD, flagged removed |\n|---|---|---|---|---|---|---|\n";
}

std::string summary_row(const AuditReport& r, const std::string& set_name) {
  return fmt::format("| {} | {:.4f} | {:.4f} | {:.1f}% | {:.1f}% | {:.4f} | {} |\n", set_name,
                     r.verdict.avg_top_vsscd, r.similarity.top_vsscd, r.verdict.pct_flagged,
                     r.verdict.pct_band, r.fvd_baseline.value,
                     r.verdict.fvd_at_full_filter
                         ? fmt::format("{:.4f}", *r.verdict.fvd_at_full_filter)
                         : std::string("n/a"));
}

}  // namespace

std::string audit_markdown(const AuditReport& r, const std::string& set_name) {
  std::string out = "# Replication audit: " + set_name + "\n\n";
  out += fmt::format("Generated by {} {}.\n\n", kToolName, kToolVersion);

  out += "## Summary\n\n";
  out += summary_header(r.similarity);
  out += summary_row(r, set_name) + "\n";
  out += "A low FVD alongside a high average top VSSCD means the distance is being earned "
         "by copies of real videos.\n\n";

  out += "## FVD\n\n";
  out += fmt::format("- value: {:.6f}\n- mean term: {:.6f}\n- trace term: {:.6f}\n"
                     "- clamped eigenvalues: {}\n",
                     r.fvd_baseline.value, r.fvd_baseline.mean_term, r.fvd_baseline.trace_term,
                     r.fvd_baseline.eigen_clamped);
  for (const auto& w : r.fvd_baseline.warnings) out += "- warning: " + w + "\n";
  out += "\n";

  auto curve_table = [&out](const Curve& c, const std::string& x_label) {
    out += "| " + x_label + " | Removed | FVD | Min remaining top score |\n|---|---|---|---|\n";
    for (const auto& p : c.points) {
      out += fmt::format("| {:.1f} | {} | {:.4f} | {:.4f} |\n", p.x_percent, p.removed_count,
                         p.fvd, p.min_remaining_top_score);
    }
    const auto flat = c.flatness();
    out += "\nFlatness (max |FVD - baseline| / baseline): " +
           (flat ? fmt::format("{:.4f}", *flat) : std::string("n/a (baseline is zero)")) + "\n";
    if (c.truncated) {
      out += "Points that would leave fewer than 2 generated videos were omitted.\n";
    }
    out += "\n";
  };
  out += "## FVD-VSSCD curve (flagged videos removed)\n\n";
  curve_table(r.curve, "Non-replicated %");
  out += "## FVD by replication rank\n\n";
  curve_table(r.rank_curve, "Retained %");
  return out;
}

std::string comparison_markdown(const std::vector<NamedAudit>& audits) {
  if (audits.empty()) fail(ErrorCode::kInvalidArgument, "nothing to compare");
  std::string out = "# Replication comparison\n\n";
  out += fmt::format("Generated by {} {}.\n\n", kToolName, kToolVersion);
  out += summary_header(audits.front().report.similarity);
  for (const auto& a : audits) {
    if (a.report.similarity.threshold != audits.front().report.similarity.threshold) {
      fail(ErrorCode::kInvalidArgument, "compared audits use different thresholds");
    }
    out += summary_row(a.report, a.name);
  }
  out += "\nA low FVD alongside a high average top VSSCD means the distance is being earned "
         "by copies of real videos.\n";
  return out;
}

nlohmann::json to_json(const std::vector<NamedAudit>& audits) {
  json rows = json::array();
  for (const auto& a : audits) {
    rows.push_back({{"name", a.name},
                    {"avg_top_vsscd", a.report.verdict.avg_top_vsscd},
                    {"top_vsscd", a.report.similarity.top_vsscd},
                    {"pct_flagged", a.report.verdict.pct_flagged},
                    {"pct_band", a.report.verdict.pct_band},
                    {"fvd", a.report.fvd_baseline.value},
                    {"fvd_at_full_filter", optional_number(a.report.verdict.fvd_at_full_filter)},
                    {"provenance", a.report.provenance}});
  }
  return {{"sets", rows}};
}

}  // namespace repaudit
