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
#include <random>
#include <sstream>
#include <tuple>

#include "doctest.h"
#include "reference_tables.hpp"
#include "svbias/error.hpp"
#include "svbias/synth.hpp"

namespace svbias {
namespace {

using reference::round_to;

SubgroupScoreSpec spec(const std::string& group, double target_mean,
                       std::uint64_t seed, std::size_t n = 2000) {
  SubgroupScoreSpec s;
  s.key = SubgroupKey({{"group", group}});
  s.target_mean = target_mean;
  s.n_target = n;
  s.n_nontarget = n;
  s.seed = seed;
  return s;
}

TrialSet corpus(const std::vector<SubgroupScoreSpec>& specs) {
  return generate(specs).trials;
}

OperatingPoint point(double fpr, double fnr) {
  OperatingPoint p;
  p.fpr = fpr;
  p.fnr = fnr;
  return p;
}

const SubgroupResult& find(const BiasReport& r, const std::string& label) {
  for (const auto& s : r.subgroups) {
    if (s.key.label() == label) return s;
  }
  throw std::runtime_error("no subgroup " + label);
}

TEST_CASE("subgroup_bias") {
  CHECK(subgroup_bias(0.154, 0.154) == 1.0);
  CHECK(std::fabs(*subgroup_bias(0.090, 0.154) - 0.5768) <= 0.01);
  CHECK(round_to(*subgroup_bias(0.400, 0.154), 3) == 2.597);
  CHECK_FALSE(subgroup_bias(0.1, 0.0).has_value());
}

TEST_CASE("threshold_bias") {
  CHECK(round_to(*threshold_bias(0.110, 0.070), 4) == 1.5714);
  CHECK(round_to(*threshold_bias(0.104, 0.086), 4) == 1.2093);
  CHECK(threshold_bias(0.2, 0.2) == 1.0);
  CHECK_FALSE(threshold_bias(0.2, 0.0).has_value());
}

TEST_CASE("reference threshold_bias column reproduces from the cost columns") {
  for (const auto& row : reference::kCostTable) {
    CAPTURE(row.subgroup);
    CHECK(round_to(*threshold_bias(row.cost_at_overall_min,
                                   row.cost_at_own_min),
                   4) == row.threshold_bias);
    CHECK(row.threshold_bias >= 1.0);
  }
}

TEST_CASE("error_rate_ratios") {
  const OperatingPoint overall = point(0.004, 0.08);
  const RateRatios same = error_rate_ratios(overall, overall);
  CHECK(same.fpr == 1.0);
  CHECK(same.fnr == 1.0);
  const RateRatios zero = error_rate_ratios(point(0.0, 0.0654), overall);
  CHECK(zero.fpr == 0.0);
  const RateRatios twice = error_rate_ratios(point(0.008, 0.16), overall);
  CHECK(twice.fpr == 2.0);
  CHECK(twice.fnr == 2.0);
  const RateRatios undefined = error_rate_ratios(overall, point(0.0, 0.0));
  CHECK_FALSE(undefined.fpr.has_value());
  CHECK_FALSE(undefined.fnr.has_value());
}

TEST_CASE("single-subgroup audit is the identity") {
  const BiasReport r = audit(corpus({spec("a", 2.0, 7)}), {});
  REQUIRE(r.subgroups.size() == 1);
  CHECK(r.subgroups[0].subgroup_bias == 1.0);
  CHECK(r.subgroups[0].threshold_bias == 1.0);
  CHECK(r.subgroups[0].fpr_ratio == 1.0);
  CHECK(r.equalized_odds.unbiased);
}

TEST_CASE("a subgroup with targets shifted down is disfavored") {
  const auto specs = std::vector{spec("good", 3.0, 1), spec("poor", 1.5, 2)};
  const SyntheticCorpus c = generate(specs);
  const BiasReport r = audit(c.trials, {});
  const SubgroupResult& poor = find(r, "poor");
  const SubgroupResult& good = find(r, "good");
  CHECK(*poor.subgroup_bias > 1.0);
  CHECK(*good.subgroup_bias < 1.0);
  CHECK(r.subgroups.front().key.label() == "good");

  // Brute force: recount the poor subgroup at the overall threshold.
  std::vector<double> t, n;
  for (std::size_t i = 0; i < c.trials.records.size(); ++i) {
    if (c.trials.subgroups[c.trials.subgroup_of[i]].label() != "poor") continue;
    const TrialRecord& rec = c.trials.records[i];
    (rec.is_target() ? t : n).push_back(rec.score);
  }
  const ErrorCounts k = error_counts_at(t, n, r.overall.threshold);
  const double cost = dcf(k.fpr(), k.fnr(), DcfConfig{});
  CHECK(poor.op_at_overall.cost == cost);
  CHECK(*poor.subgroup_bias ==
        doctest::Approx(cost / r.overall.cost).epsilon(1e-12));
  CHECK(poor.op_at_own_min.cost == brute_force_min_dcf(t, n, {}).cost);
}

TEST_CASE("identical distributions give subgroup_bias near 1") {
  std::vector<SubgroupScoreSpec> specs;
  for (int g = 0; g < 4; ++g) {
    specs.push_back(spec("g" + std::to_string(g), 2.0, 100 + g, 10000));
  }
  const BiasReport r = audit(corpus(specs), {});
  for (const auto& s : r.subgroups) {
    CAPTURE(s.key.label());
    CHECK(std::fabs(*s.subgroup_bias - 1.0) <= 0.1);
  }
  CHECK(r.equalized_odds.max_fpr_gap < 0.02);
  CHECK(r.equalized_odds.max_fnr_gap < 0.02);
}

TEST_CASE("single-label and unknown trials are reported but not ratioed") {
  std::istringstream meta(
      "speaker_id,group\na1,a\na2,a\nb1,b\nb2,b\n");
  std::istringstream text(
      "1 a1/x a1/y 3\n1 a2/x a2/y 2\n0 a1/x a2/y 0\n0 a2/x a1/y 1\n"
      "1 b1/x b1/y 2.5\n1 b2/x b2/y 0.5\n"
      "0 zz/x a1/y 2\n1 zz/x zz/y 4\n");
  const TrialSet trials =
      assign_subgroups(parse_trials(text, "t"), parse_metadata(meta, "m"),
                       {"group"});
  const BiasReport r = audit(trials, {});
  REQUIRE(r.subgroups.size() == 1);
  CHECK(r.subgroups[0].key.label() == "a");
  REQUIRE(r.diagnostics.excluded.size() == 1);
  CHECK(r.diagnostics.excluded[0].reason == "no nontarget trials");
  CHECK(r.diagnostics.excluded_trials == 2);
  CHECK(r.diagnostics.unknown_trials == 2);
  CHECK(r.diagnostics.audited_trials == 4);
  CHECK(r.diagnostics.total_trials == 8);
  CHECK(r.diagnostics.unknown_counts_at_overall.has_value());
  CHECK(r.subgroups[0].low_support);
  CHECK(r.diagnostics.speaker_count_basis == "enrollment");
}

TEST_CASE("audit rejects unassigned trials and a one-sided overall set") {
  TrialSet bare;
  bare.records.push_back({"a/1", "a/2", Label::kTarget, 1.0});
  CHECK_THROWS_AS(audit(bare, {}), InputError);
  std::istringstream meta("speaker_id,group\na,x\n");
  std::istringstream text("1 a/1 a/2 1\n");
  const TrialSet one = assign_subgroups(parse_trials(text, "t"),
                                        parse_metadata(meta, "m"), {"group"});
  CHECK_THROWS_AS(audit(one, {}), EvaluationError);
}

std::vector<SubgroupScoreSpec> random_specs(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> groups(2, 6), size(50, 400);
  std::uniform_real_distribution<double> mean(0.5, 3.5);
  std::vector<SubgroupScoreSpec> specs;
  const int n = groups(rng);
  for (int g = 0; g < n; ++g) {
    SubgroupScoreSpec s = spec("g" + std::to_string(g), mean(rng), rng());
    s.n_target = size(rng);
    s.n_nontarget = size(rng);
    s.n_speakers = 1 + g;
    specs.push_back(s);
  }
  return specs;
}

TEST_CASE("threshold_bias is never below 1") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const BiasReport r = audit(corpus(random_specs(rng)), {});
    for (const auto& s : r.subgroups) {
      CHECK(s.op_at_own_min.cost <= s.op_at_overall.cost);
      CHECK(*s.threshold_bias >= 1.0);
    }
  }
}

TEST_CASE("overall error counts are the sum over subgroups") {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 30; ++rep) {
    const BiasReport r = audit(corpus(random_specs(rng)), {});
    std::size_t fa = 0, fr = 0, nn = 0, nt = 0;
    for (const auto& s : r.subgroups) {
      fa += s.op_at_overall.counts.false_accepts;
      fr += s.op_at_overall.counts.false_rejects;
      nn += s.op_at_overall.counts.n_nontarget;
      nt += s.op_at_overall.counts.n_target;
    }
    CHECK(fa == r.overall.counts.false_accepts);
    CHECK(fr == r.overall.counts.false_rejects);
    CHECK(nn == r.overall.counts.n_nontarget);
    CHECK(nt == r.overall.counts.n_target);
    // Trial-weighted mean of subgroup FPRs equals the overall FPR.
    double weighted = 0.0;
    for (const auto& s : r.subgroups) {
      weighted += s.op_at_overall.fpr * static_cast<double>(s.n_nontarget);
    }
    CHECK(weighted / static_cast<double>(nn) ==
          doctest::Approx(r.overall.fpr).epsilon(1e-12));
  }
}

void check_same_ratios(const BiasReport& a, const BiasReport& b) {
  REQUIRE(a.subgroups.size() == b.subgroups.size());
  for (std::size_t i = 0; i < a.subgroups.size(); ++i) {
    CHECK(a.subgroups[i].key == b.subgroups[i].key);
    CHECK(a.subgroups[i].subgroup_bias == b.subgroups[i].subgroup_bias);
    CHECK(a.subgroups[i].threshold_bias == b.subgroups[i].threshold_bias);
    CHECK(a.subgroups[i].fpr_ratio == b.subgroups[i].fpr_ratio);
    CHECK(a.subgroups[i].fnr_ratio == b.subgroups[i].fnr_ratio);
  }
}

TEST_CASE("ratios are invariant to strictly increasing score transforms") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    const TrialSet base = corpus(random_specs(rng));
    TrialSet warped = base;
    for (auto& rec : warped.records) rec.score = std::exp(rec.score) + 5.0;
    check_same_ratios(audit(base, {}), audit(warped, {}));
  }
}

TEST_CASE("ratios are invariant to a common scaling of the costs") {
  std::mt19937_64 rng(14);
  for (int rep = 0; rep < 10; ++rep) {
    const TrialSet trials = corpus(random_specs(rng));
    AuditOptions base, scaled;
    scaled.dcf.c_fn = 4.0;
    scaled.dcf.c_fp = 4.0;
    const BiasReport a = audit(trials, base);
    const BiasReport b = audit(trials, scaled);
    CHECK(b.overall.cost == 4.0 * a.overall.cost);
    check_same_ratios(a, b);

    for (const auto& [fn, fp, k] : {std::tuple{1.0, 1.0, 3.7},
                                    std::tuple{1.0, 10.0, 3.0},
                                    std::tuple{2.5, 0.5, 0.1}}) {
      AuditOptions x, y;
      x.dcf.c_fn = fn;
      x.dcf.c_fp = fp;
      y.dcf.c_fn = fn * k;
      y.dcf.c_fp = fp * k;
      CAPTURE(k);
      check_same_ratios(audit(trials, x), audit(trials, y));
      CHECK(audit(trials, x).overall.threshold ==
            audit(trials, y).overall.threshold);
    }
  }
}

TEST_CASE("support floor flags small subgroups") {
  auto big = spec("big", 2.0, 1, 200);
  big.n_speakers = 5;
  auto few_speakers = spec("few", 2.0, 2, 200);
  few_speakers.n_speakers = 4;
  auto few_trials = spec("thin", 2.0, 3, 200);
  few_trials.n_nontarget = 99;
  const BiasReport r = audit(corpus({big, few_speakers, few_trials}), {});
  CHECK_FALSE(find(r, "big").low_support);
  CHECK(find(r, "few").low_support);
  CHECK(find(r, "thin").low_support);
  CHECK(find(r, "big").n_speakers == 5);
}

TEST_CASE("equalized-odds tolerance") {
  const TrialSet trials = corpus({spec("a", 2.0, 1), spec("b", 1.0, 2)});
  AuditOptions strict;
  CHECK_FALSE(audit(trials, strict).equalized_odds.unbiased);
  AuditOptions loose;
  loose.eo_fpr_tolerance = 1.0;
  loose.eo_fnr_tolerance = 1.0;
  const BiasReport r = audit(trials, loose);
  CHECK(r.equalized_odds.unbiased);
  double worst = 0.0;
  for (const auto& s : r.subgroups) {
    worst = std::max(worst, std::fabs(s.op_at_overall.fnr - r.overall.fnr));
  }
  CHECK(r.equalized_odds.max_fnr_gap == worst);
  CHECK(std::fabs(find(r, r.equalized_odds.worst_fnr_subgroup)
                      .op_at_overall.fnr -
                  r.overall.fnr) == worst);
}

TEST_CASE("parallel audit matches the serial one") {
  std::mt19937_64 rng(15);
  const TrialSet trials = corpus(random_specs(rng));
  AuditOptions serial, parallel;
  parallel.jobs = 0;
  const BiasReport a = audit(trials, serial);
  const BiasReport b = audit(trials, parallel);
  check_same_ratios(a, b);
  CHECK(a.overall.cost == b.overall.cost);
}

TEST_CASE("compare_runs") {
  const auto specs = std::vector{spec("a", 2.0, 1), spec("b", 2.5, 2),
                                 spec("c", 1.5, 3)};
  const BiasReport run = audit(corpus(specs), {});

  SUBCASE("self comparison lies on the diagonal") {
    const RunComparison cmp = compare_runs(run, run);
    CHECK(cmp.pairs.size() == 3);
    CHECK(cmp.a_lower == 0);
    CHECK(cmp.b_lower == 0);
    CHECK(cmp.ties == 3);
    for (const auto& p : cmp.pairs) CHECK(p.bias_a == p.bias_b);
  }
  SUBCASE("a degraded subgroup moves above the diagonal") {
    auto worse = specs;
    worse[0].target_mean = 0.5;
    const RunComparison cmp = compare_runs(run, audit(corpus(worse), {}));
    const auto& pa = cmp.pairs[0];
    CHECK(pa.label == "a");
    CHECK(*pa.bias_b > *pa.bias_a);
    CHECK(cmp.a_lower + cmp.b_lower + cmp.ties == 3);
  }
  SUBCASE("unmatched subgroups are listed") {
    const BiasReport two = audit(corpus({specs[0], specs[1]}), {});
    const RunComparison cmp = compare_runs(run, two);
    CHECK(cmp.only_in_a == std::vector<std::string>{"group=c"});
    CHECK(cmp.only_in_b.empty());
    CHECK(cmp.pairs.size() == 2);
  }
  SUBCASE("errors") {
    const BiasReport other = audit(corpus({spec("zz", 2.0, 9)}), {});
    CHECK_THROWS_WITH_AS(compare_runs(run, other),
                         "the two runs share no subgroup", InputError);
    BiasReport renamed = run;
    renamed.attributes = {"region"};
    CHECK_THROWS_WITH_AS(compare_runs(run, renamed),
                         "subgroup schema mismatch: [group] vs [region]",
                         InputError);
  }
}

}  // namespace
}  // namespace svbias
