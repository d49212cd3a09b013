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

#include "svbias/report_io.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "svbias/error.hpp"
#include "text_util.hpp"

namespace svbias {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

Json threshold_json(double t) {
  if (std::isinf(t)) return t < 0 ? "-inf" : "inf";
  return t;
}

double threshold_from(const Json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    throw InputError("malformed report: bad threshold '" + s + "'");
  }
  return j.get<double>();
}

Json ratio_json(const Ratio& r) {
  if (!r) return std::string(kUndefined);
  return *r;
}

Ratio ratio_from(const Json& j) {
  if (j.is_string()) return std::nullopt;
  return j.get<double>();
}

Json counts_json(const ErrorCounts& c) {
  return Json{{"false_accepts", c.false_accepts},
              {"n_nontarget", c.n_nontarget},
              {"false_rejects", c.false_rejects},
              {"n_target", c.n_target}};
}

ErrorCounts counts_from(const Json& j) {
  return {j.at("false_accepts").get<std::uint64_t>(),
          j.at("n_nontarget").get<std::uint64_t>(),
          j.at("false_rejects").get<std::uint64_t>(),
          j.at("n_target").get<std::uint64_t>()};
}

Json point_json(const OperatingPoint& op) {
  Json j{{"threshold", threshold_json(op.threshold)},
         {"fpr", op.fpr},
         {"fnr", op.fnr},
         {"cost", op.cost}};
  j["counts"] = counts_json(op.counts);
  return j;
}

OperatingPoint point_from(const Json& j) {
  OperatingPoint op;
  op.threshold = threshold_from(j.at("threshold"));
  op.fpr = j.at("fpr").get<double>();
  op.fnr = j.at("fnr").get<double>();
  op.cost = j.at("cost").get<double>();
  op.counts = counts_from(j.at("counts"));
  return op;
}

Json key_json(const SubgroupKey& key) {
  Json parts = Json::array();
  for (const auto& [name, value] : key.parts()) {
    parts.push_back(Json::array({name, value}));
  }
  return parts;
}

SubgroupKey key_from(const Json& j) {
  std::vector<std::pair<std::string, std::string>> parts;
  for (const Json& pair : j) {
    parts.emplace_back(pair.at(0).get<std::string>(),
                       pair.at(1).get<std::string>());
  }
  return SubgroupKey(std::move(parts));
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

std::string format_number(double value) { return format_printf("%.9g", value); }

std::string format_ratio(const Ratio& ratio, int decimals) {
  if (!ratio) return std::string(kUndefined);
  if (decimals < 0) return format_number(*ratio);
  const std::string fmt = "%." + std::to_string(decimals) + "f";
  return format_printf(fmt.c_str(), *ratio);
}

std::string report_to_json(const BiasReport& report) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["attributes"] = report.attributes;
  j["dcf"] = Json{{"p_target", report.config.p_target},
                  {"c_fn", report.config.c_fn},
                  {"c_fp", report.config.c_fp},
                  {"preset", report.config.preset_name}};
  j["support_floor"] =
      Json{{"min_speakers", report.support.min_speakers},
           {"min_trials_per_label", report.support.min_trials_per_label}};
  j["decision_rule"] = "accept iff score >= threshold";
  j["speaker_count_basis"] = report.diagnostics.speaker_count_basis;

  Json overall = point_json(report.overall);
  overall["eer"] = report.overall_eer;
  j["overall"] = std::move(overall);

  const EqualizedOddsSummary& eo = report.equalized_odds;
  j["equalized_odds"] = Json{{"max_fpr_gap", eo.max_fpr_gap},
                             {"max_fnr_gap", eo.max_fnr_gap},
                             {"worst_fpr_subgroup", eo.worst_fpr_subgroup},
                             {"worst_fnr_subgroup", eo.worst_fnr_subgroup},
                             {"fpr_tolerance", eo.fpr_tolerance},
                             {"fnr_tolerance", eo.fnr_tolerance},
                             {"unbiased", eo.unbiased}};

  Json subgroups = Json::array();
  for (const SubgroupResult& r : report.subgroups) {
    Json s;
    s["subgroup"] = r.key.label();
    s["key"] = r.key.canonical();
    s["attributes"] = key_json(r.key);
    s["n_speakers"] = r.n_speakers;
    s["n_target"] = r.n_target;
    s["n_nontarget"] = r.n_nontarget;
    s["at_overall_min"] = point_json(r.op_at_overall);
    s["at_own_min"] = point_json(r.op_at_own_min);
    s["eer"] = r.eer;
    s["subgroup_bias"] = ratio_json(r.subgroup_bias);
    s["threshold_bias"] = ratio_json(r.threshold_bias);
    s["fpr_ratio"] = ratio_json(r.fpr_ratio);
    s["fnr_ratio"] = ratio_json(r.fnr_ratio);
    s["low_support"] = r.low_support;
    subgroups.push_back(std::move(s));
  }
  j["subgroups"] = std::move(subgroups);

  const AuditDiagnostics& d = report.diagnostics;
  Json diag;
  diag["total_trials"] = d.total_trials;
  diag["audited_trials"] = d.audited_trials;
  diag["unknown_trials"] = d.unknown_trials;
  diag["excluded_trials"] = d.excluded_trials;
  diag["unknown_counts_at_overall"] =
      d.unknown_counts_at_overall ? counts_json(*d.unknown_counts_at_overall)
                                  : Json(nullptr);
  Json excluded = Json::array();
  for (const ExcludedSubgroup& e : d.excluded) {
    excluded.push_back(Json{{"subgroup", e.key.label()},
                            {"key", e.key.canonical()},
                            {"attributes", key_json(e.key)},
                            {"n_speakers", e.n_speakers},
                            {"reason", e.reason},
                            {"counts_at_overall", counts_json(e.counts_at_overall)}});
  }
  diag["excluded"] = std::move(excluded);
  diag["missing_speakers"] = d.missing_speakers;
  diag["cross_subgroup_trials"] = d.cross_subgroup_trials;
  diag["warnings"] = d.warnings;
  j["diagnostics"] = std::move(diag);
  return j.dump(2) + "\n";
}

BiasReport report_from_json(std::string_view text) {
  BiasReport report;
  try {
    const Json j = Json::parse(text);
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw InputError("unsupported report schema_version");
    }
    report.attributes = j.at("attributes").get<std::vector<std::string>>();
    const Json& dcf = j.at("dcf");
    report.config.p_target = dcf.at("p_target").get<double>();
    report.config.c_fn = dcf.at("c_fn").get<double>();
    report.config.c_fp = dcf.at("c_fp").get<double>();
    report.config.preset_name = dcf.at("preset").get<std::string>();
    report.support.min_speakers =
        j.at("support_floor").at("min_speakers").get<std::size_t>();
    report.support.min_trials_per_label =
        j.at("support_floor").at("min_trials_per_label").get<std::size_t>();
    report.overall = point_from(j.at("overall"));
    report.overall_eer = j.at("overall").at("eer").get<double>();

    const Json& eo = j.at("equalized_odds");
    report.equalized_odds.max_fpr_gap = eo.at("max_fpr_gap").get<double>();
    report.equalized_odds.max_fnr_gap = eo.at("max_fnr_gap").get<double>();
    report.equalized_odds.worst_fpr_subgroup =
        eo.at("worst_fpr_subgroup").get<std::string>();
    report.equalized_odds.worst_fnr_subgroup =
        eo.at("worst_fnr_subgroup").get<std::string>();
    report.equalized_odds.fpr_tolerance = eo.at("fpr_tolerance").get<double>();
    report.equalized_odds.fnr_tolerance = eo.at("fnr_tolerance").get<double>();
    report.equalized_odds.unbiased = eo.at("unbiased").get<bool>();

    for (const Json& s : j.at("subgroups")) {
      SubgroupResult r;
      r.key = key_from(s.at("attributes"));
      r.n_speakers = s.at("n_speakers").get<std::size_t>();
      r.n_target = s.at("n_target").get<std::size_t>();
      r.n_nontarget = s.at("n_nontarget").get<std::size_t>();
      r.op_at_overall = point_from(s.at("at_overall_min"));
      r.op_at_own_min = point_from(s.at("at_own_min"));
      r.eer = s.at("eer").get<double>();
      r.subgroup_bias = ratio_from(s.at("subgroup_bias"));
      r.threshold_bias = ratio_from(s.at("threshold_bias"));
      r.fpr_ratio = ratio_from(s.at("fpr_ratio"));
      r.fnr_ratio = ratio_from(s.at("fnr_ratio"));
      r.low_support = s.at("low_support").get<bool>();
      report.subgroups.push_back(std::move(r));
    }

    const Json& d = j.at("diagnostics");
    AuditDiagnostics& diag = report.diagnostics;
    diag.speaker_count_basis = j.at("speaker_count_basis").get<std::string>();
    diag.total_trials = d.at("total_trials").get<std::size_t>();
    diag.audited_trials = d.at("audited_trials").get<std::size_t>();
    diag.unknown_trials = d.at("unknown_trials").get<std::size_t>();
    diag.excluded_trials = d.at("excluded_trials").get<std::size_t>();
    if (!d.at("unknown_counts_at_overall").is_null()) {
      diag.unknown_counts_at_overall =
          counts_from(d.at("unknown_counts_at_overall"));
    }
    for (const Json& e : d.at("excluded")) {
      ExcludedSubgroup ex;
      ex.key = key_from(e.at("attributes"));
      ex.n_speakers = e.at("n_speakers").get<std::size_t>();
      ex.reason = e.at("reason").get<std::string>();
      ex.counts_at_overall = counts_from(e.at("counts_at_overall"));
      diag.excluded.push_back(std::move(ex));
    }
    diag.missing_speakers =
        d.at("missing_speakers").get<std::vector<std::string>>();
    diag.cross_subgroup_trials = d.at("cross_subgroup_trials").get<std::size_t>();
    diag.warnings = d.at("warnings").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed report JSON: ") + e.what());
  }
  return report;
}

void write_report_csv(std::ostream& out, const BiasReport& report) {
  out << "subgroup,n_speakers,n_target,n_nontarget,fpr,fnr,cdet_at_overall,"
         "cdet_at_own_min,subgroup_bias,threshold_bias,fpr_ratio,fnr_ratio,"
         "low_support\n";
  for (const SubgroupResult& r : report.subgroups) {
    out << csv_field(r.key.label()) << ',' << r.n_speakers << ',' << r.n_target
        << ',' << r.n_nontarget << ',' << format_number(r.op_at_overall.fpr)
        << ',' << format_number(r.op_at_overall.fnr) << ','
        << format_number(r.op_at_overall.cost) << ','
        << format_number(r.op_at_own_min.cost) << ','
        << format_ratio(r.subgroup_bias) << ','
        << format_ratio(r.threshold_bias) << ',' << format_ratio(r.fpr_ratio)
        << ',' << format_ratio(r.fnr_ratio) << ','
        << (r.low_support ? "true" : "false") << '\n';
  }
}

void write_composition_csv(std::ostream& out, const CompositionReport& report) {
  out << "attribute,value,rank,n_speakers,speaker_pct,n_utterances,"
         "utterance_pct,gap_pct\n";
  for (const CategoryShare& row : report.rows) {
    out << csv_field(row.attribute) << ',' << csv_field(row.value) << ','
        << row.rank << ',' << row.n_speakers << ','
        << format_number(row.speaker_pct) << ',' << row.n_utterances << ','
        << format_number(row.utterance_pct) << ','
        << format_number(row.gap_pct) << '\n';
  }
}

void write_comparison_csv(std::ostream& out, const RunComparison& comparison) {
  out << "subgroup,bias_a,bias_b\n";
  for (const BiasPair& p : comparison.pairs) {
    out << csv_field(p.label) << ',' << format_ratio(p.bias_a) << ','
        << format_ratio(p.bias_b) << '\n';
  }
}

}  // namespace svbias
