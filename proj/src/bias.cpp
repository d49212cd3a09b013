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

#include "svbias/bias.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "parallel.hpp"
#include "svbias/error.hpp"
#include "text_util.hpp"

namespace svbias {

namespace {

Ratio safe_ratio(double num, double den) {
  if (!(den > 0.0) || !std::isfinite(num) || !std::isfinite(den)) {
    return std::nullopt;
  }
  return num / den;
}

struct GroupScores {
  std::vector<double> targets;
  std::vector<double> nontargets;
};

bool bias_order(const SubgroupResult& a, const SubgroupResult& b) {
  if (a.subgroup_bias.has_value() != b.subgroup_bias.has_value()) {
    return a.subgroup_bias.has_value();
  }
  if (a.subgroup_bias && *a.subgroup_bias != *b.subgroup_bias) {
    return *a.subgroup_bias < *b.subgroup_bias;
  }
  return a.key < b.key;
}

}  // namespace

Ratio subgroup_bias(double subgroup_cost, double overall_cost) {
  return safe_ratio(subgroup_cost, overall_cost);
}

Ratio threshold_bias(double cost_at_overall_min, double cost_at_own_min) {
  return safe_ratio(cost_at_overall_min, cost_at_own_min);
}

RateRatios error_rate_ratios(const OperatingPoint& subgroup,
                             const OperatingPoint& overall) {
  return {safe_ratio(subgroup.fpr, overall.fpr),
          safe_ratio(subgroup.fnr, overall.fnr)};
}

std::vector<std::string> BiasReport::schema() const {
  std::vector<std::string> names = attributes;
  std::sort(names.begin(), names.end());
  return names;
}

BiasReport audit(const TrialSet& trials, const AuditOptions& options) {
  if (!trials.has_subgroups()) {
    throw InputError("audit needs a trial set with subgroups assigned");
  }
  options.dcf.validate();

  BiasReport report;
  report.attributes = trials.attributes;
  report.config = options.dcf;
  report.support = options.support;

  // Bucket scores per subgroup in one pass; the overall set is all trials,
  // unknown bucket included.
  std::vector<GroupScores> groups(trials.subgroups.size());
  GroupScores all;
  for (std::size_t i = 0; i < trials.records.size(); ++i) {
    const TrialRecord& r = trials.records[i];
    GroupScores& g = groups[trials.subgroup_of[i]];
    (r.is_target() ? g.targets : g.nontargets).push_back(r.score);
    (r.is_target() ? all.targets : all.nontargets).push_back(r.score);
  }

  try {
    report.overall_curve = compute_error_curve(all.targets, all.nontargets);
  } catch (const EvaluationError& e) {
    throw EvaluationError(std::string("overall trial set: ") + e.what());
  }
  report.overall = min_dcf(report.overall_curve, options.dcf);
  report.overall_eer = eer(report.overall_curve);
  const double theta = report.overall.threshold;
  // Ratios of costs are taken on the scale-free form of the cost.
  const double overall_relative =
      relative_cost(report.overall.fpr, report.overall.fnr, options.dcf);

  const std::vector<std::size_t> speakers = trials.speaker_counts();
  const std::size_t n_groups = trials.subgroups.size();
  std::vector<std::optional<SubgroupResult>> results(n_groups);
  std::vector<std::optional<ExcludedSubgroup>> excluded(n_groups);

  parallel_for(n_groups, options.jobs, [&](std::size_t g) {
    const SubgroupKey& key = trials.subgroups[g];
    if (key.is_unknown()) return;
    const GroupScores& scores = groups[g];
    if (scores.targets.empty() || scores.nontargets.empty()) {
      ExcludedSubgroup ex;
      ex.key = key;
      ex.n_speakers = speakers[g];
      ex.reason = scores.targets.empty() ? "no target trials"
                                         : "no nontarget trials";
      ex.counts_at_overall =
          error_counts_at(scores.targets, scores.nontargets, theta);
      excluded[g] = std::move(ex);
      return;
    }
    SubgroupResult r;
    r.key = key;
    r.n_speakers = speakers[g];
    r.n_target = scores.targets.size();
    r.n_nontarget = scores.nontargets.size();
    r.curve = compute_error_curve(scores.targets, scores.nontargets);
    r.op_at_overall = operating_point_at(r.curve, theta, options.dcf);
    r.op_at_own_min = min_dcf(r.curve, options.dcf);
    r.eer = eer(r.curve);
    const double at_overall =
        relative_cost(r.op_at_overall.fpr, r.op_at_overall.fnr, options.dcf);
    r.subgroup_bias = subgroup_bias(at_overall, overall_relative);
    r.threshold_bias = threshold_bias(
        at_overall,
        relative_cost(r.op_at_own_min.fpr, r.op_at_own_min.fnr, options.dcf));
    const RateRatios rates = error_rate_ratios(r.op_at_overall, report.overall);
    r.fpr_ratio = rates.fpr;
    r.fnr_ratio = rates.fnr;
    r.low_support =
        r.n_speakers < options.support.min_speakers ||
        std::min(r.n_target, r.n_nontarget) <
            options.support.min_trials_per_label;
    results[g] = std::move(r);
  });

  AuditDiagnostics& diag = report.diagnostics;
  diag.total_trials = trials.records.size();
  diag.missing_speakers = trials.diagnostics.missing_speakers;
  diag.cross_subgroup_trials = trials.diagnostics.cross_subgroup_trials;
  diag.warnings = trials.diagnostics.warnings;
  for (std::size_t g = 0; g < n_groups; ++g) {
    const std::size_t n = groups[g].targets.size() + groups[g].nontargets.size();
    if (trials.subgroups[g].is_unknown()) {
      diag.unknown_trials += n;
      diag.unknown_counts_at_overall =
          error_counts_at(groups[g].targets, groups[g].nontargets, theta);
    } else if (results[g]) {
      diag.audited_trials += n;
      report.subgroups.push_back(std::move(*results[g]));
    } else {
      diag.excluded_trials += n;
      diag.warnings.push_back("subgroup " + excluded[g]->key.label() +
                              " excluded from ratios: " + excluded[g]->reason);
      diag.excluded.push_back(std::move(*excluded[g]));
    }
  }
  std::sort(report.subgroups.begin(), report.subgroups.end(), bias_order);

  EqualizedOddsSummary& eo = report.equalized_odds;
  eo.fpr_tolerance = options.eo_fpr_tolerance;
  eo.fnr_tolerance = options.eo_fnr_tolerance;
  for (const SubgroupResult& r : report.subgroups) {
    const double dfpr = std::fabs(r.op_at_overall.fpr - report.overall.fpr);
    const double dfnr = std::fabs(r.op_at_overall.fnr - report.overall.fnr);
    if (eo.worst_fpr_subgroup.empty() || dfpr > eo.max_fpr_gap) {
      eo.max_fpr_gap = dfpr;
      eo.worst_fpr_subgroup = r.key.label();
    }
    if (eo.worst_fnr_subgroup.empty() || dfnr > eo.max_fnr_gap) {
      eo.max_fnr_gap = dfnr;
      eo.worst_fnr_subgroup = r.key.label();
    }
  }
  eo.unbiased = !report.subgroups.empty() &&
                eo.max_fpr_gap <= eo.fpr_tolerance &&
                eo.max_fnr_gap <= eo.fnr_tolerance;
  return report;
}

RunComparison compare_runs(const BiasReport& a, const BiasReport& b) {
  RunComparison cmp;
  const std::vector<std::string> schema_a = a.schema();
  const std::vector<std::string> schema_b = b.schema();
  if (schema_a != schema_b) {
    throw InputError("subgroup schema mismatch: [" + join(schema_a, ",") +
                     "] vs [" + join(schema_b, ",") + "]");
  }
  cmp.schema = schema_a;

  std::map<std::string, const SubgroupResult*> in_b;
  for (const SubgroupResult& r : b.subgroups) in_b[r.key.canonical()] = &r;
  std::map<std::string, const SubgroupResult*> in_a;
  for (const SubgroupResult& r : a.subgroups) in_a[r.key.canonical()] = &r;

  for (const auto& [key, ra] : in_a) {
    auto it = in_b.find(key);
    if (it == in_b.end()) {
      cmp.only_in_a.push_back(key);
      continue;
    }
    const SubgroupResult* rb = it->second;
    cmp.pairs.push_back({key, ra->key.label(), ra->subgroup_bias,
                         rb->subgroup_bias});
    if (ra->subgroup_bias && rb->subgroup_bias) {
      if (*ra->subgroup_bias < *rb->subgroup_bias) {
        ++cmp.a_lower;
      } else if (*rb->subgroup_bias < *ra->subgroup_bias) {
        ++cmp.b_lower;
      } else {
        ++cmp.ties;
      }
    }
  }
  for (const auto& [key, rb] : in_b) {
    if (!in_a.count(key)) cmp.only_in_b.push_back(key);
  }
  if (cmp.pairs.empty()) {
    throw InputError("the two runs share no subgroup");
  }
  return cmp;
}

}  // namespace svbias
