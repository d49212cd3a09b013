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

// svbias: audit speaker-verification trial scores for subgroup bias.
//
//   svbias audit --scores trials.txt --metadata speakers.csv
//                --attributes nationality,gender --output-dir out/
//   svbias compare out_a/report.json out_b/report.json --output-dir cmp/
//   svbias synth --attributes nationality,gender --group ireland,f
//                --group usa,m:target_mean=1.5 --output-dir synth/
//   svbias composition --scores trials.txt --metadata speakers.csv
//                --attributes gender,nationality
//
// Exit codes: 0 ok, 2 input/parse error, 3 evaluation error, 4 I/O error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "svbias/bias.hpp"
#include "svbias/error.hpp"
#include "svbias/pipeline.hpp"
#include "svbias/report_io.hpp"
#include "svbias/synth.hpp"
#include "svbias/trial_data.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitInput = 2;
constexpr int kExitEvaluation = 3;
constexpr int kExitIo = 4;

int exit_code(svbias::ErrorKind kind) {
  switch (kind) {
    case svbias::ErrorKind::kInput: return kExitInput;
    case svbias::ErrorKind::kEvaluation: return kExitEvaluation;
    case svbias::ErrorKind::kIo: return kExitIo;
  }
  return kExitEvaluation;
}

std::string default_output_dir() {
  const char* env = std::getenv("SVBIAS_OUTPUT_DIR");
  return env && *env ? env : "svbias-out";
}

struct InputFlags {
  std::string scores;
  std::string metadata;
  std::vector<std::string> attributes;
  std::string columns = "label,enroll,test,score";
  char speaker_delimiter = '/';
  std::size_t speaker_segment = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--scores", scores,
                    "trial file: label enroll_utt test_utt score")
        ->required();
    cmd->add_option("--metadata", metadata,
                    "speaker CSV with header speaker_id,<attr>,...")
        ->required();
    cmd->add_option("--attributes", attributes,
                    "metadata columns defining subgroups, in key order")
        ->delimiter(',')
        ->required();
    cmd->add_option("--columns", columns,
                    "trial column order, e.g. enroll,test,score,label")
        ->capture_default_str();
    cmd->add_option("--speaker-delimiter", speaker_delimiter,
                    "separator in utterance ids")
        ->capture_default_str();
    cmd->add_option("--speaker-segment", speaker_segment,
                    "segment index holding the speaker id")
        ->capture_default_str();
  }

  svbias::SpeakerIdRule rule() const {
    return {speaker_delimiter, speaker_segment};
  }
};

// "usa,m:target_mean=1.5,n_target=500" -> spec on top of `base`.
svbias::SubgroupScoreSpec parse_group(const std::string& text,
                                      const std::vector<std::string>& attributes,
                                      svbias::SubgroupScoreSpec base) {
  const auto colon = text.find(':');
  std::vector<std::string> values;
  {
    std::stringstream ss(text.substr(0, colon));
    for (std::string v; std::getline(ss, v, ',');) values.push_back(v);
  }
  if (values.size() != attributes.size()) {
    throw svbias::InputError("group '" + text + "' needs " +
                             std::to_string(attributes.size()) + " values");
  }
  std::vector<std::pair<std::string, std::string>> parts;
  for (std::size_t i = 0; i < values.size(); ++i) {
    parts.emplace_back(attributes[i], values[i]);
  }
  base.key = svbias::SubgroupKey(std::move(parts));
  if (colon == std::string::npos) return base;
  std::stringstream ss(text.substr(colon + 1));
  for (std::string kv; std::getline(ss, kv, ',');) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw svbias::InputError("bad group override '" + kv + "'");
    }
    const std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
    try {
      if (k == "target_mean") base.target_mean = std::stod(v);
      else if (k == "target_sd") base.target_sd = std::stod(v);
      else if (k == "nontarget_mean") base.nontarget_mean = std::stod(v);
      else if (k == "nontarget_sd") base.nontarget_sd = std::stod(v);
      else if (k == "n_target") base.n_target = std::stoul(v);
      else if (k == "n_nontarget") base.n_nontarget = std::stoul(v);
      else if (k == "speakers") base.n_speakers = std::stoul(v);
      else if (k == "seed") base.seed = std::stoull(v);
      else throw svbias::InputError("unknown group override '" + k + "'");
    } catch (const std::logic_error&) {
      throw svbias::InputError("bad value in group override '" + kv + "'");
    }
  }
  return base;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subgroup bias audit for speaker-verification trial scores"};
  app.set_config("--config", "",
                 "INI/TOML config file; flags given on the command line win");
  app.require_subcommand(1);

  // audit
  InputFlags audit_in;
  svbias::AuditConfig audit_cfg;
  std::string audit_out = default_output_dir();
  std::string formats = "json,csv,svg,det-csv";
  CLI::App* audit_cmd =
      app.add_subcommand("audit", "Run the full bias audit and write reports");
  audit_in.add_to(audit_cmd);
  svbias::AuditOptions& opts = audit_cfg.options;
  audit_cmd->add_option("--p-target", opts.dcf.p_target, "target prior")
      ->capture_default_str();
  audit_cmd->add_option("--c-fn", opts.dcf.c_fn, "false-negative cost")
      ->capture_default_str();
  audit_cmd->add_option("--c-fp", opts.dcf.c_fp, "false-positive cost")
      ->capture_default_str();
  audit_cmd->add_option("--min-speakers", opts.support.min_speakers,
                        "low-support floor: unique enrollment speakers")
      ->capture_default_str();
  audit_cmd->add_option("--min-trials", opts.support.min_trials_per_label,
                        "low-support floor: trials per label")
      ->capture_default_str();
  audit_cmd->add_option("--eo-fpr-tol", opts.eo_fpr_tolerance,
                        "equalized-odds tolerance on |dFPR|")
      ->capture_default_str();
  audit_cmd->add_option("--eo-fnr-tol", opts.eo_fnr_tolerance,
                        "equalized-odds tolerance on |dFNR|")
      ->capture_default_str();
  audit_cmd->add_option("--jobs", opts.jobs, "worker threads (0 = all cores)")
      ->capture_default_str();
  audit_cmd->add_option("--formats", formats, "subset of json,csv,svg,det-csv")
      ->capture_default_str();
  audit_cmd->add_option("--output-dir", audit_out,
                        "output directory (env SVBIAS_OUTPUT_DIR)")
      ->capture_default_str();
  audit_cmd->add_flag("--quiet", "skip the summary table");

  // compare
  std::string report_a, report_b;
  std::string compare_out = default_output_dir();
  CLI::App* compare_cmd = app.add_subcommand(
      "compare", "Pair subgroup bias across two report.json files");
  compare_cmd->add_option("report_a", report_a, "first report.json")->required();
  compare_cmd->add_option("report_b", report_b, "second report.json")->required();
  compare_cmd->add_option("--output-dir", compare_out, "output directory")
      ->capture_default_str();

  // synth
  std::vector<std::string> synth_attributes;
  std::vector<std::string> synth_groups;
  svbias::SubgroupScoreSpec synth_base;
  std::string synth_out = default_output_dir();
  CLI::App* synth_cmd = app.add_subcommand(
      "synth", "Write synthetic Gaussian trial and metadata files");
  synth_cmd->add_option("--attributes", synth_attributes, "attribute names")
      ->delimiter(',')
      ->required();
  synth_cmd->add_option("--group", synth_groups,
                        "values[:key=value,...], repeatable")
      ->required();
  synth_cmd->add_option("--target-mean", synth_base.target_mean)
      ->capture_default_str();
  synth_cmd->add_option("--target-sd", synth_base.target_sd)
      ->capture_default_str();
  synth_cmd->add_option("--nontarget-mean", synth_base.nontarget_mean)
      ->capture_default_str();
  synth_cmd->add_option("--nontarget-sd", synth_base.nontarget_sd)
      ->capture_default_str();
  synth_cmd->add_option("--n-target", synth_base.n_target)->capture_default_str();
  synth_cmd->add_option("--n-nontarget", synth_base.n_nontarget)
      ->capture_default_str();
  synth_cmd->add_option("--speakers", synth_base.n_speakers)
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth_base.seed,
                        "base seed; group i uses seed + i unless overridden")
      ->capture_default_str();
  synth_cmd->add_option("--output-dir", synth_out, "output directory")
      ->capture_default_str();

  // composition
  InputFlags comp_in;
  std::size_t top_k = 3;
  std::string comp_out = default_output_dir();
  CLI::App* comp_cmd = app.add_subcommand(
      "composition", "Speaker- and utterance-level representation summary");
  comp_in.add_to(comp_cmd);
  comp_cmd->add_option("--top-k", top_k, "categories listed per attribute")
      ->capture_default_str();
  comp_cmd->add_option("--output-dir", comp_out, "output directory")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*audit_cmd) {
      audit_cfg.scores_path = audit_in.scores;
      audit_cfg.metadata_path = audit_in.metadata;
      audit_cfg.attributes = audit_in.attributes;
      audit_cfg.trial_format =
          svbias::TrialFileFormat::from_string(audit_in.columns);
      audit_cfg.speaker_rule = audit_in.rule();
      audit_cfg.formats = svbias::parse_formats(formats);
      audit_cfg.output_dir = audit_out;
      const svbias::AuditRun run = svbias::run_audit(audit_cfg);
      if (!audit_cmd->get_option("--quiet")->as<bool>()) {
        svbias::print_summary(std::cout, run.report);
      }
    } else if (*compare_cmd) {
      const svbias::RunComparison cmp =
          svbias::run_compare({report_a, report_b, compare_out});
      std::cout << "shared subgroups: " << cmp.pairs.size()
                << "  lower in A: " << cmp.a_lower
                << "  lower in B: " << cmp.b_lower << "  ties: " << cmp.ties
                << "  only in A: " << cmp.only_in_a.size()
                << "  only in B: " << cmp.only_in_b.size() << '\n';
    } else if (*synth_cmd) {
      std::vector<svbias::SubgroupScoreSpec> specs;
      for (std::size_t i = 0; i < synth_groups.size(); ++i) {
        svbias::SubgroupScoreSpec base = synth_base;
        base.seed = synth_base.seed + i;
        specs.push_back(parse_group(synth_groups[i], synth_attributes, base));
      }
      const svbias::SyntheticCorpus corpus = svbias::generate(specs);
      std::ostringstream trials, metadata;
      svbias::write_trials(trials, corpus.trials.records);
      svbias::write_metadata(metadata, corpus.metadata);
      svbias::write_file(fs::path(synth_out) / "trials.txt", trials.str());
      svbias::write_file(fs::path(synth_out) / "metadata.csv", metadata.str());
      std::cout << "wrote " << corpus.trials.records.size() << " trials and "
                << corpus.metadata.size() << " speakers to " << synth_out
                << '\n';
    } else if (*comp_cmd) {
      svbias::TrialSet trials = svbias::parse_trials(
          comp_in.scores, svbias::TrialFileFormat::from_string(comp_in.columns));
      const svbias::MetadataTable metadata =
          svbias::parse_metadata(comp_in.metadata);
      const svbias::CompositionReport report = svbias::composition_summary(
          trials, metadata, comp_in.attributes, comp_in.rule());
      std::ostringstream csv;
      svbias::write_composition_csv(csv, report);
      svbias::write_file(fs::path(comp_out) / "composition.csv", csv.str());
      std::cout << report.n_speakers << " speakers, "
                << report.n_utterance_occurrences << " utterance occurrences\n";
      for (const std::string& attribute : comp_in.attributes) {
        for (const svbias::CategoryShare& s : report.top(attribute, top_k)) {
          std::cout << attribute << " #" << s.rank << " " << s.value << ": "
                    << svbias::format_number(s.speaker_pct) << "% speakers / "
                    << svbias::format_number(s.utterance_pct)
                    << "% utterances\n";
        }
      }
    }
  } catch (const svbias::Error& e) {
    std::cerr << "svbias: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "svbias: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "svbias: " << e.what() << '\n';
    return kExitEvaluation;
  }
  return 0;
}
