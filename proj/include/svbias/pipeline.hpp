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

#ifndef SVBIAS_PIPELINE_HPP_
#define SVBIAS_PIPELINE_HPP_

#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "svbias/bias.hpp"
#include "svbias/trial_data.hpp"

namespace svbias {

enum class OutputFormat { kJson, kCsv, kSvg, kDetCsv };

std::set<OutputFormat> parse_formats(const std::string& csv);

struct AuditConfig {
  std::filesystem::path scores_path;
  std::filesystem::path metadata_path;
  std::vector<std::string> attributes;
  AuditOptions options;
  std::filesystem::path output_dir;
  std::set<OutputFormat> formats{OutputFormat::kJson, OutputFormat::kCsv,
                                 OutputFormat::kSvg, OutputFormat::kDetCsv};
  TrialFileFormat trial_format;
  SpeakerIdRule speaker_rule;

  // Throws InputError/IoError before any computation.
  void validate() const;
};

struct AuditRun {
  BiasReport report;
  CompositionReport composition;
  std::vector<std::filesystem::path> artifacts;  // files written
};

// Parse -> assign -> audit -> write report.json, report.csv, det/<key>.csv,
// det.svg and composition.csv under output_dir. On failure every file
// written so far is removed and the error is rethrown.
AuditRun run_audit(const AuditConfig& config);

// Summary table (overall operating point, EER, best/worst subgroup bias).
void print_summary(std::ostream& out, const BiasReport& report);

struct CompareConfig {
  std::filesystem::path report_a;
  std::filesystem::path report_b;
  std::filesystem::path output_dir;
};

// Writes compare.csv and compare.svg.
RunComparison run_compare(const CompareConfig& config);
RunComparison run_compare(const BiasReport& a, const BiasReport& b,
                          const std::filesystem::path& output_dir);

BiasReport load_report(const std::filesystem::path& path);

// Writes bytes to `path` (creating parent directories); throws IoError.
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace svbias

#endif  // SVBIAS_PIPELINE_HPP_
