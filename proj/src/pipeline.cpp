/*
 * Copyright 2026 The svbias Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "svbias/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <map>
#include <ostream>
#include <sstream>

#include "svbias/det.hpp"
#include "svbias/error.hpp"
#include "svbias/report_io.hpp"
#include "text_util.hpp"

namespace svbias {

namespace {

namespace fs = std::filesystem;

std::string file_stem_for(const std::string& label) {
  std::string out;
  for (unsigned char c : label) {
    out += (std::isalnum(c) || c == '_' || c == '-' || c == '.')
               ? static_cast<char>(c)
               : '-';
  }
  return out.empty() ? std::string("subgroup") : out;
}

// Files collected in memory and written at the end, so a failed run leaves
// nothing behind.
class ArtifactSet {
 public:
  void add(fs::path relative, std::string bytes) {
    files_.emplace_back(std::move(relative), std::move(bytes));
  }

  std::vector<fs::path> commit(const fs::path& root) {
    std::vector<fs::path> written;
    std::vector<fs::path> created_dirs;
    try {
      for (const auto& [relative, bytes] : files_) {
        const fs::path target = root / relative;
        for (fs::path dir = target.parent_path(); !dir.empty() && !fs::exists(dir);
             dir = dir.parent_path()) {
          created_dirs.push_back(dir);
        }
        write_file(target, bytes);
        written.push_back(target);
      }
    } catch (...) {
      std::error_code ec;
      for (const fs::path& p : written) fs::remove(p, ec);
      std::sort(created_dirs.begin(), created_dirs.end());
      for (auto it = created_dirs.rbegin(); it != created_dirs.rend(); ++it) {
        fs::remove(*it, ec);  // only succeeds when empty
      }
      throw;
    }
    return written;
  }

 private:
  std::vector<std::pair<fs::path, std::string>> files_;
};

std::string read_text(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw InputError("no such file: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void check_output_dir(const fs::path& dir) {
  if (dir.empty()) throw InputError("no output directory given");
  std::error_code ec;
  if (fs::exists(dir, ec) && !fs::is_directory(dir, ec)) {
    throw IoError("output path is not a directory: " + dir.string());
  }
}

}  // namespace

std::set<OutputFormat> parse_formats(const std::string& csv) {
  std::set<OutputFormat> formats;
  for (std::string_view token : split(csv, ',')) {
    token = trim(token);
    if (token == "json") {
      formats.insert(OutputFormat::kJson);
    } else if (token == "csv") {
      formats.insert(OutputFormat::kCsv);
    } else if (token == "svg") {
      formats.insert(OutputFormat::kSvg);
    } else if (token == "det-csv") {
      formats.insert(OutputFormat::kDetCsv);
    } else {
      throw InputError("unknown output format '" + std::string(token) +
                       "' (json, csv, svg, det-csv)");
    }
  }
  return formats;
}

void AuditConfig::validate() const {
  std::error_code ec;
  if (!fs::is_regular_file(scores_path, ec)) {
    throw InputError("scores file not found: " + scores_path.string());
  }
  if (!fs::is_regular_file(metadata_path, ec)) {
    throw InputError("metadata file not found: " + metadata_path.string());
  }
  if (attributes.empty()) throw InputError("no audit attributes given");
  options.dcf.validate();
  check_output_dir(output_dir);
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::error_code ec;
  if (!path.parent_path().empty()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) {
      throw IoError("cannot create " + path.parent_path().string() + ": " +
                    ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << bytes;
  out.close();
  if (!out) throw IoError("write failed for " + path.string());
}

AuditRun run_audit(const AuditConfig& config) {
  config.validate();
  AuditRun run;
  TrialSet trials = parse_trials(config.scores_path, config.trial_format);
  const MetadataTable metadata = parse_metadata(config.metadata_path);
  trials = assign_subgroups(std::move(trials), metadata, config.attributes,
                            config.speaker_rule);
  run.report = audit(trials, config.options);
  run.composition = composition_summary(trials, metadata, config.attributes,
                                        config.speaker_rule);

  ArtifactSet artifacts;
  const auto wants = [&](OutputFormat f) { return config.formats.count(f) > 0; };
  if (wants(OutputFormat::kJson)) {
    artifacts.add("report.json", report_to_json(run.report));
  }
  if (wants(OutputFormat::kCsv)) {
    std::ostringstream csv;
    write_report_csv(csv, run.report);
    artifacts.add("report.csv", csv.str());
  }
  if (wants(OutputFormat::kSvg) || wants(OutputFormat::kDetCsv)) {
    const std::vector<DetCurve> curves = det_curves(run.report);
    if (wants(OutputFormat::kDetCsv)) {
      std::map<std::string, int> used;
      for (const DetCurve& c : curves) {
        std::string stem = file_stem_for(c.source);
        if (const int n = ++used[stem]; n > 1) stem += "~" + std::to_string(n);
        std::ostringstream csv;
        write_det_csv(csv, c);
        artifacts.add(fs::path("det") / (stem + ".csv"), csv.str());
      }
    }
    if (wants(OutputFormat::kSvg)) {
      PlotStyle style;
      style.title = "DET curves by subgroup (" + join(config.attributes, ", ") + ")";
      artifacts.add("det.svg", render_det_svg(curves, style));
    }
  }
  {
    std::ostringstream csv;
    write_composition_csv(csv, run.composition);
    artifacts.add("composition.csv", csv.str());
  }
  run.artifacts = artifacts.commit(config.output_dir);
  return run;
}

void print_summary(std::ostream& out, const BiasReport& report) {
  const OperatingPoint& o = report.overall;
  out << "overall: threshold " << format_number(o.threshold) << "  FPR "
      << format_printf("%.4f", o.fpr) << "  FNR " << format_printf("%.4f", o.fnr)
      << "  min C_det " << format_printf("%.4f", o.cost) << "  EER "
      << format_printf("%.4f", report.overall_eer) << '\n';
  out << "dcf: p_target " << format_number(report.config.p_target) << "  c_fn "
      << format_number(report.config.c_fn) << "  c_fp "
      << format_number(report.config.c_fp) << '\n';
  const AuditDiagnostics& d = report.diagnostics;
  out << "trials: " << d.total_trials << " total, " << d.audited_trials
      << " audited, " << d.unknown_trials << " unknown, " << d.excluded_trials
      << " excluded\n\n";

  char line[256];
  std::snprintf(line, sizeof line, "%-24s %8s %10s %10s %10s %10s %s\n",
                "subgroup", "speakers", "cdet@all", "sg_bias", "cdet@own",
                "thr_bias", "");
  out << line;
  for (const SubgroupResult& r : report.subgroups) {
    std::snprintf(line, sizeof line, "%-24s %8zu %10.4f %10s %10.4f %10s %s\n",
                  r.key.label().c_str(), r.n_speakers, r.op_at_overall.cost,
                  format_ratio(r.subgroup_bias, 4).c_str(), r.op_at_own_min.cost,
                  format_ratio(r.threshold_bias, 4).c_str(),
                  r.low_support ? "low-support" : "");
    out << line;
  }
  const auto defined = std::count_if(
      report.subgroups.begin(), report.subgroups.end(),
      [](const SubgroupResult& r) { return r.subgroup_bias.has_value(); });
  if (defined > 0) {
    const SubgroupResult& best = report.subgroups.front();
    const SubgroupResult& worst = report.subgroups[static_cast<std::size_t>(defined) - 1];
    out << "\nbest subgroup bias:  " << best.key.label() << " "
        << format_ratio(best.subgroup_bias, 4) << '\n';
    out << "worst subgroup bias: " << worst.key.label() << " "
        << format_ratio(worst.subgroup_bias, 4) << '\n';
  }
  const EqualizedOddsSummary& eo = report.equalized_odds;
  out << "equalized odds: max |dFPR| " << format_printf("%.4f", eo.max_fpr_gap)
      << " (" << eo.worst_fpr_subgroup << "), max |dFNR| "
      << format_printf("%.4f", eo.max_fnr_gap) << " ("
      << eo.worst_fnr_subgroup << ") -> "
      << (eo.unbiased ? "unbiased" : "biased") << " at tolerance ("
      << format_number(eo.fpr_tolerance) << ", "
      << format_number(eo.fnr_tolerance) << ")\n";
  for (const std::string& w : d.warnings) out << "warning: " << w << '\n';
}

BiasReport load_report(const fs::path& path) {
  return report_from_json(read_text(path));
}

RunComparison run_compare(const CompareConfig& config) {
  check_output_dir(config.output_dir);
  const BiasReport a = load_report(config.report_a);
  const BiasReport b = load_report(config.report_b);
  return run_compare(a, b, config.output_dir);
}

RunComparison run_compare(const BiasReport& a, const BiasReport& b,
                          const fs::path& output_dir) {
  check_output_dir(output_dir);
  RunComparison cmp = compare_runs(a, b);
  ArtifactSet artifacts;
  std::ostringstream csv;
  write_comparison_csv(csv, cmp);
  artifacts.add("compare.csv", csv.str());
  artifacts.add("compare.svg", render_comparison_svg(cmp));
  artifacts.commit(output_dir);
  return cmp;
}

}  // namespace svbias
