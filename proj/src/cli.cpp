#include "repaudit/cli.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "repaudit/augment.hpp"
#include "repaudit/curve.hpp"
#include "repaudit/embedding_format.hpp"
#include "repaudit/error.hpp"
#include "repaudit/frechet.hpp"
#include "repaudit/image_io.hpp"
#include "repaudit/io.hpp"
#include "repaudit/report.hpp"
#include "repaudit/similarity.hpp"

namespace repaudit {

namespace {

using nlohmann::json;

std::vector<double> parse_steps(const std::string& list) {
  std::vector<double> steps;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      steps.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorCode::kInvalidArgument, "bad curve step '" + item + "'");
    }
  }
  return steps;
}

// Flags shared by the subcommands; each records whether it was given.
struct Flags {
  std::string real, gen, fvd_real, fvd_gen, out, formats, steps, config;
  double threshold = kDefaultThreshold;
  double band = kDefaultUniquenessBand;
  double epsilon = 0.0;
  std::map<std::string, CLI::Option*> given;

  bool has(const std::string& name) const {
    auto it = given.find(name);
    return it != given.end() && it->second->count() > 0;
  }
};

void add_set_flags(CLI::App* cmd, Flags& f, bool with_fvd_sets) {
  f.given["real"] = cmd->add_option("--real", f.real, "Real-video embedding file");
  f.given["gen"] = cmd->add_option("--gen", f.gen, "Generated-video embedding file");
  if (with_fvd_sets) {
    f.given["fvd_real"] = cmd->add_option(
        "--fvd-real", f.fvd_real, "Real-video FVD feature file (default: --real)");
    f.given["fvd_gen"] = cmd->add_option(
        "--fvd-gen", f.fvd_gen, "Generated-video FVD feature file (default: --gen)");
  }
}

void add_audit_flags(CLI::App* cmd, Flags& f) {
  f.given["threshold"] = cmd->add_option("--threshold", f.threshold, "Replication threshold");
  f.given["band"] =
      cmd->add_option("--uniqueness-band", f.band, "Secondary flag level (uniqueness band)");
  f.given["out"] = cmd->add_option("--out", f.out, "Output directory");
  f.given["formats"] = cmd->add_option("--format", f.formats, "Report formats: json,csv,md");
  f.given["steps"] =
      cmd->add_option("--curve-steps", f.steps, "Retained fractions, e.g. 1.0,0.9,0.8");
  f.given["epsilon"] =
      cmd->add_option("--epsilon", f.epsilon, "Diagonal epsilon added to covariances");
  f.given["config"] = cmd->add_option("--config", f.config, "JSON config file");
}

// flags > config file > defaults
AuditConfig resolve_config(const Flags& f) {
  AuditConfig c;
  if (f.has("config")) {
    const auto bytes = read_file_bytes(f.config);
    json j;
    try {
      j = json::parse(bytes.begin(), bytes.end());
    } catch (const json::exception& e) {
      fail(ErrorCode::kInvalidArgument, "config " + f.config + ": " + e.what());
    }
    merge_config(c, j);
  }
  if (f.has("real")) c.real_path = f.real;
  if (f.has("gen")) c.gen_path = f.gen;
  if (f.has("fvd_real")) c.fvd_real_path = f.fvd_real;
  if (f.has("fvd_gen")) c.fvd_gen_path = f.fvd_gen;
  if (f.has("out")) c.output_dir = f.out;
  if (f.has("formats")) c.report_formats = parse_formats(f.formats);
  if (f.has("steps")) c.curve_steps = parse_steps(f.steps);
  if (f.has("threshold")) c.threshold = f.threshold;
  if (f.has("band")) c.uniqueness_band = f.band;
  if (f.has("epsilon")) c.diagonal_epsilon = f.epsilon;
  check_config(c);
  return c;
}

EmbeddingFile load(const std::string& path, const char* flag) {
  if (path.empty()) fail(ErrorCode::kInvalidArgument, std::string(flag) + " is required");
  return read_embedding_set(path);
}

void require_fvd_family(const EmbeddingFile& f) {
  if (!is_fvd_feature_family(f.manifest.extractor)) {
    fail(ErrorCode::kExtractorMismatch,
         "extractor '" + f.manifest.extractor +
             "' is a copy-detection descriptor, not an FVD feature family");
  }
}

AuditInputs load_inputs(const AuditConfig& c) {
  AuditInputs in;
  in.real = load(c.real_path, "--real");
  in.gen = load(c.gen_path, "--gen");
  in.fvd_real = c.fvd_real_path.empty() ? in.real : load(c.fvd_real_path, "--fvd-real");
  in.fvd_gen = c.fvd_gen_path.empty() ? in.gen : load(c.fvd_gen_path, "--fvd-gen");
  return in;
}

bool wants(const AuditConfig& c, ReportFormat f) { return c.report_formats.count(f) > 0; }

void print_fvd(std::ostream& out, const FvdResult& r) {
  out << "fvd: " << format_number(r.value) << "\n"
      << "mean_term: " << format_number(r.mean_term) << "\n"
      << "trace_term: " << format_number(r.trace_term) << "\n"
      << "eigen_clamped: " << r.eigen_clamped << "\n";
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
}

int cmd_score(const Flags& f, std::ostream& out) {
  const AuditConfig c = resolve_config(f);
  const auto real = load(c.real_path, "--real");
  const auto gen = load(c.gen_path, "--gen");
  validate_pair(real, gen);
  const auto rep = score(real.set, gen.set, c.threshold, c.uniqueness_band);

  if (!c.output_dir.empty()) {
    OutputTransaction tx(c.output_dir);
    if (wants(c, ReportFormat::kJson)) tx.stage("similarity.json", to_json(rep).dump(2) + "\n");
    if (wants(c, ReportFormat::kCsv)) tx.stage("similarity.csv", similarity_csv(rep));
    if (wants(c, ReportFormat::kMarkdown)) {
      tx.stage("similarity.md", similarity_markdown(rep, gen.set.name));
    }
    tx.commit();
  }
  out << "top_vsscd: " << format_number(rep.top_vsscd) << "\n"
      << "average_top: " << format_number(rep.average_top) << "\n"
      << "flagged: " << rep.replicated_ids.size() << "/" << rep.per_gen.size() << "\n";
  return kExitOk;
}

int cmd_fvd(const Flags& f, std::ostream& out) {
  const AuditConfig c = resolve_config(f);
  const auto real = load(c.real_path, "--real");
  const auto gen = load(c.gen_path, "--gen");
  validate_pair(real, gen);
  require_fvd_family(real);
  const auto r = fvd(real.set, gen.set, FrechetOptions{c.diagonal_epsilon});
  if (!c.output_dir.empty()) {
    OutputTransaction tx(c.output_dir);
    tx.stage("fvd.json", to_json(r).dump(2) + "\n");
    tx.commit();
  }
  print_fvd(out, r);
  return kExitOk;
}

int cmd_curve(const Flags& f, const std::string& mode, std::ostream& out) {
  const AuditConfig c = resolve_config(f);
  const AuditInputs in = load_inputs(c);
  validate_pair(in.real, in.gen);
  validate_pair(in.fvd_real, in.fvd_gen);
  require_fvd_family(in.fvd_real);
  const auto rep = score(in.real.set, in.gen.set, c.threshold, c.uniqueness_band);
  const FrechetOptions options{c.diagonal_epsilon};
  const Curve curve =
      mode == "flagged" ? flagged_curve(in.fvd_real.set, in.fvd_gen.set, rep, options)
                        : integrated_curve(in.fvd_real.set, in.fvd_gen.set, rep, c.curve_steps,
                                           options);
  if (c.output_dir.empty()) {
    out << curve_csv(curve);
    return kExitOk;
  }
  OutputTransaction tx(c.output_dir);
  if (wants(c, ReportFormat::kCsv)) {
    tx.stage("curve.csv", curve_csv(curve));
    tx.stage("curve_plot.csv", curve_plot_csv(curve));
  }
  if (wants(c, ReportFormat::kJson)) tx.stage("curve.json", to_json(curve).dump(2) + "\n");
  tx.commit();
  out << "points: " << curve.points.size() << "\n"
      << "baseline_fvd: " << format_number(curve.baseline_fvd) << "\n";
  return kExitOk;
}

int cmd_validate(const Flags& f, std::ostream& out) {
  const AuditConfig c = resolve_config(f);
  auto describe = [&out](const std::string& path, const EmbeddingFile& e) {
    out << path << ": ok (" << e.set.name << ", " << to_string(e.set.role) << ", "
        << e.set.count() << " x " << e.set.dim << ", extractor " << e.manifest.extractor
        << ")\n";
  };
  const auto real = load(c.real_path, "--real");
  describe(c.real_path, real);
  if (!c.gen_path.empty()) {
    const auto gen = read_embedding_set(c.gen_path);
    describe(c.gen_path, gen);
    validate_pair(real, gen);
    out << "pair: ok\n";
  }
  return kExitOk;
}

int cmd_audit(const Flags& f, std::ostream& out) {
  const AuditConfig c = resolve_config(f);
  if (c.output_dir.empty()) fail(ErrorCode::kInvalidArgument, "--out is required");
  const AuditInputs in = load_inputs(c);
  const AuditReport r = run_audit(in, c);

  OutputTransaction tx(c.output_dir);
  if (wants(c, ReportFormat::kJson)) tx.stage("audit.json", to_json(r).dump(2) + "\n");
  if (wants(c, ReportFormat::kCsv)) {
    tx.stage("similarity.csv", similarity_csv(r.similarity));
    tx.stage("curve.csv", curve_csv(r.curve));
    tx.stage("curve_plot.csv", curve_plot_csv(r.curve));
    tx.stage("rank_curve.csv", curve_csv(r.rank_curve));
  }
  if (wants(c, ReportFormat::kMarkdown)) {
    tx.stage("audit.md", audit_markdown(r, in.gen.set.name));
  }
  tx.commit();

  out << "avg_top_vsscd: " << format_number(r.verdict.avg_top_vsscd) << "\n"
      << "pct_flagged: " << format_number(r.verdict.pct_flagged) << "\n";
  print_fvd(out, r.fvd_baseline);
  out << "fvd_at_full_filter: "
      << (r.verdict.fvd_at_full_filter ? format_number(*r.verdict.fvd_at_full_filter)
                                       : std::string("n/a"))
      << "\n";
  return kExitOk;
}

int cmd_compare(const Flags& f, const std::vector<std::string>& gen_paths, std::ostream& out) {
  const AuditConfig base = resolve_config(f);
  if (gen_paths.empty()) fail(ErrorCode::kInvalidArgument, "at least one --gen is required");
  const auto real = load(base.real_path, "--real");
  std::vector<NamedAudit> audits;
  for (const auto& path : gen_paths) {
    AuditConfig c = base;
    c.gen_path = path;
    const auto gen = read_embedding_set(path);
    audits.push_back({gen.set.name, run_audit({real, gen, real, gen}, c)});
  }
  const std::string table = comparison_markdown(audits);
  if (!base.output_dir.empty()) {
    OutputTransaction tx(base.output_dir);
    if (wants(base, ReportFormat::kJson)) {
      tx.stage("comparison.json", to_json(audits).dump(2) + "\n");
    }
    if (wants(base, ReportFormat::kMarkdown)) tx.stage("comparison.md", table);
    tx.commit();
  }
  out << table;
  return kExitOk;
}

struct ProbeFlags {
  std::string image, out, stem = "probe", ops = "flip,crop,occlusion,translation,rotation";
  std::string descriptors;
  double crop = 0.8, occlusion = 0.2, shift_x = 0.1, shift_y = 0.1, angle = 15.0;
};

std::vector<AugmentSpec> probe_specs(const ProbeFlags& p) {
  std::vector<AugmentSpec> specs;
  std::stringstream ss(p.ops);
  std::string op;
  while (std::getline(ss, op, ',')) {
    if (op == "flip") {
      specs.push_back(AugmentSpec::flip());
    } else if (op == "crop") {
      specs.push_back(AugmentSpec::crop(p.crop));
    } else if (op == "occlusion") {
      specs.push_back(AugmentSpec::occlusion(p.occlusion));
    } else if (op == "translation") {
      specs.push_back(AugmentSpec::translation(p.shift_x, p.shift_y));
    } else if (op == "rotation") {
      specs.push_back(AugmentSpec::rotation(p.angle));
    } else {
      fail(ErrorCode::kInvalidArgument, "unknown augmentation '" + op + "'");
    }
  }
  return specs;
}

int cmd_probe(const ProbeFlags& p, std::ostream& out) {
  if (p.image.empty()) fail(ErrorCode::kInvalidArgument, "--image is required");
  if (p.out.empty()) fail(ErrorCode::kInvalidArgument, "--out is required");
  const FrameImage img = read_png(p.image);
  const auto specs = probe_specs(p);
  const ProbeBundle bundle = build_probe(img, specs, p.stem);

  OutputTransaction tx(p.out);
  for (const auto& frame : bundle.frames) tx.stage(frame.file_name, frame.png);
  tx.stage(bundle.manifest_file_name, bundle.manifest);

  std::string table;
  if (!p.descriptors.empty()) {
    const auto desc = read_embedding_set(p.descriptors);
    const DescriptorProvider provider = [&desc](const std::string& name, const FrameImage*)
        -> std::optional<std::vector<float>> {
      for (std::size_t i = 0; i < desc.set.count(); ++i) {
        if (desc.set.ids[i] == name) {
          const auto r = desc.set.row(i);
          return std::vector<float>(r.begin(), r.end());
        }
      }
      return std::nullopt;
    };
    table = format_robustness_table(robustness_table(provider, img, specs));
    tx.stage(p.stem + "_robustness.md", table);
  }
  for (const auto& path : tx.commit()) out << path.string() << "\n";
  out << table;
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Training-data replication audit for video generation models", "repaudit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  Flags score_f, fvd_f, curve_f, validate_f, audit_f;
  std::string curve_mode = "rank";
  ProbeFlags probe_f;

  auto* score_cmd = app.add_subcommand("score", "Copy-similarity scores of generated vs real videos");
  add_set_flags(score_cmd, score_f, false);
  add_audit_flags(score_cmd, score_f);

  auto* fvd_cmd = app.add_subcommand("fvd", "Frechet distance between two feature sets");
  add_set_flags(fvd_cmd, fvd_f, false);
  add_audit_flags(fvd_cmd, fvd_f);

  auto* curve_cmd = app.add_subcommand("curve", "FVD after excluding replicated videos");
  add_set_flags(curve_cmd, curve_f, true);
  add_audit_flags(curve_cmd, curve_f);
  curve_cmd->add_option("--mode", curve_mode, "rank (sweep curve steps) or flagged")
      ->check(CLI::IsMember({"rank", "flagged"}));

  auto* probe_cmd = app.add_subcommand("probe", "Write augmented conditioning frames");
  probe_cmd->add_option("--image", probe_f.image, "Source frame (PNG)");
  probe_cmd->add_option("--out", probe_f.out, "Output directory");
  probe_cmd->add_option("--stem", probe_f.stem, "File name stem");
  probe_cmd->add_option("--ops", probe_f.ops, "Augmentations to apply, comma separated");
  probe_cmd->add_option("--crop", probe_f.crop, "Central crop fraction");
  probe_cmd->add_option("--occlusion", probe_f.occlusion, "Occluder side fraction");
  probe_cmd->add_option("--shift-x", probe_f.shift_x, "Horizontal shift fraction");
  probe_cmd->add_option("--shift-y", probe_f.shift_y, "Vertical shift fraction");
  probe_cmd->add_option("--angle", probe_f.angle, "Rotation in degrees");
  probe_cmd->add_option("--descriptors", probe_f.descriptors,
                        "Embedding file with ids orig, <op>..., random: prints a robustness table");

  auto* validate_cmd = app.add_subcommand("validate", "Check embedding files and pair compatibility");
  add_set_flags(validate_cmd, validate_f, false);
  validate_f.given["config"] =
      validate_cmd->add_option("--config", validate_f.config, "JSON config file");

  auto* audit_cmd = app.add_subcommand("audit", "Score, FVD and curves in one report");
  add_set_flags(audit_cmd, audit_f, true);
  add_audit_flags(audit_cmd, audit_f);

  Flags compare_f;
  std::vector<std::string> compare_gens;
  auto* compare_cmd =
      app.add_subcommand("compare", "Summary table of several generated sets against one real set");
  compare_f.given["real"] =
      compare_cmd->add_option("--real", compare_f.real, "Real-video embedding file");
  compare_cmd->add_option("--gen", compare_gens, "Generated-video embedding file (repeatable)");
  add_audit_flags(compare_cmd, compare_f);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (*score_cmd) return cmd_score(score_f, out);
    if (*fvd_cmd) return cmd_fvd(fvd_f, out);
    if (*curve_cmd) return cmd_curve(curve_f, curve_mode, out);
    if (*probe_cmd) return cmd_probe(probe_f, out);
    if (*validate_cmd) return cmd_validate(validate_f, out);
    if (*audit_cmd) return cmd_audit(audit_f, out);
    if (*compare_cmd) return cmd_compare(compare_f, compare_gens, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitValidation;
}

}  // namespace repaudit
