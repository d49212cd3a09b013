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

#ifndef SVBIAS_BIAS_HPP_
#define SVBIAS_BIAS_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "svbias/metrics.hpp"
#include "svbias/trial_data.hpp"

namespace svbias {

// A ratio whose denominator may be zero. nullopt renders as "undefined".
using Ratio = std::optional<double>;

// Cost at the overall operating threshold relative to the overall cost.
// > 1: the subgroup is disfavored; < 1: favored. Undefined when the overall
// system has zero cost.
Ratio subgroup_bias(double subgroup_cost, double overall_cost);

// Cost at the overall threshold relative to the subgroup's own minimum cost.
// > 1: the subgroup would gain from its own threshold.
Ratio threshold_bias(double cost_at_overall_min, double cost_at_own_min);

struct RateRatios {
  Ratio fpr;
  Ratio fnr;
};

// Componentwise subgroup/overall FPR and FNR ratios.
RateRatios error_rate_ratios(const OperatingPoint& subgroup,
                             const OperatingPoint& overall);

struct SupportFloor {
  std::size_t min_speakers = 5;
  std::size_t min_trials_per_label = 100;
};

struct AuditOptions {
  DcfConfig dcf;
  SupportFloor support;
  // A run is "unbiased at θ" when every subgroup's |ΔFPR| and |ΔFNR| against
  // the overall rates are within these tolerances.
  double eo_fpr_tolerance = 0.0;
  double eo_fnr_tolerance = 0.0;
  // Worker threads for per-subgroup work; 0 = hardware concurrency.
  unsigned jobs = 1;
};

struct SubgroupResult {
  SubgroupKey key;
  std::size_t n_speakers = 0;  // unique enrollment speakers
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;
  OperatingPoint op_at_overall;
  OperatingPoint op_at_own_min;
  Ratio subgroup_bias;
  Ratio threshold_bias;
  Ratio fpr_ratio;
  Ratio fnr_ratio;
  double eer = 0.0;
  bool low_support = false;
  ErrorCurve curve;  // not serialized
};

// A subgroup that cannot be evaluated (one label class missing).
struct ExcludedSubgroup {
  SubgroupKey key;
  std::size_t n_speakers = 0;
  std::string reason;
  ErrorCounts counts_at_overall;
};

struct EqualizedOddsSummary {
  double max_fpr_gap = 0.0;
  double max_fnr_gap = 0.0;
  std::string worst_fpr_subgroup;
  std::string worst_fnr_subgroup;
  double fpr_tolerance = 0.0;
  double fnr_tolerance = 0.0;
  bool unbiased = false;
};

struct AuditDiagnostics {
  std::size_t total_trials = 0;
  std::size_t audited_trials = 0;   // in evaluable subgroups
  std::size_t unknown_trials = 0;   // unknown bucket
  std::size_t excluded_trials = 0;  // in single-label subgroups
  std::optional<ErrorCounts> unknown_counts_at_overall;
  std::vector<ExcludedSubgroup> excluded;
  std::vector<std::string> missing_speakers;
  std::size_t cross_subgroup_trials = 0;
  std::vector<std::string> warnings;
  std::string speaker_count_basis = "enrollment";
};

struct BiasReport {
  std::vector<std::string> attributes;
  DcfConfig config;
  SupportFloor support;
  OperatingPoint overall;
  double overall_eer = 0.0;
  ErrorCurve overall_curve;  // not serialized
  // Sorted by subgroup_bias ascending; undefined last; ties by canonical key.
  std::vector<SubgroupResult> subgroups;
  EqualizedOddsSummary equalized_odds;
  AuditDiagnostics diagnostics;

  // Sorted attribute names; the key schema compared across runs.
  std::vector<std::string> schema() const;
};

// End-to-end bias evaluation of a subgroup-assigned trial set:
//  1. overall curve and its min-DCF threshold;
//  2. every subgroup read at that threshold and at its own minimum;
//  3. bias ratios, equalized-odds gaps and low-support flags.
BiasReport audit(const TrialSet& trials, const AuditOptions& options);

struct BiasPair {
  std::string key;    // canonical
  std::string label;  // display
  Ratio bias_a;
  Ratio bias_b;
};

struct RunComparison {
  std::vector<std::string> schema;
  std::vector<BiasPair> pairs;  // shared subgroups, canonical key order
  std::size_t a_lower = 0;
  std::size_t b_lower = 0;
  std::size_t ties = 0;
  std::vector<std::string> only_in_a;
  std::vector<std::string> only_in_b;
};

// Pairs subgroup_bias across two runs. Throws InputError on a schema
// mismatch or when no subgroup is shared.
RunComparison compare_runs(const BiasReport& a, const BiasReport& b);

}  // namespace svbias

#endif  // SVBIAS_BIAS_HPP_
