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

#include "svbias/synth.hpp"

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "svbias/det.hpp"
#include "svbias/error.hpp"

namespace svbias {
namespace {

SubgroupScoreSpec spec(const std::string& group, double target_mean,
                       std::size_t n, std::uint64_t seed = 1) {
  SubgroupScoreSpec s;
  s.key = SubgroupKey({{"gender", group}});
  s.target_mean = target_mean;
  s.n_target = n;
  s.n_nontarget = n;
  s.seed = seed;
  return s;
}

void split(const TrialSet& set, std::vector<double>& t, std::vector<double>& n) {
  for (const auto& r : set.records) (r.is_target() ? t : n).push_back(r.score);
}

TEST_CASE("generation is deterministic") {
  const std::vector specs{spec("f", 2.0, 500, 3), spec("m", 1.0, 400, 4)};
  const SyntheticCorpus a = generate(specs);
  const SyntheticCorpus b = generate(specs);
  CHECK(a.trials.records == b.trials.records);
  CHECK(a.trials.provenance.checksum == b.trials.provenance.checksum);
  CHECK(a.trials.subgroup_of == b.trials.subgroup_of);
  const SyntheticCorpus c = generate(std::vector{spec("f", 2.0, 500, 5)});
  CHECK(c.trials.records[0].score != a.trials.records[0].score);
}

TEST_CASE("NormalStream draws are pinned") {
  NormalStream s(1);
  const double first = s.next();
  NormalStream again(1);
  CHECK(again.next() == first);
  CHECK(std::isfinite(first));
  // u = ((x >> 11) + 0.5) * 2^-53 from the standard-pinned engine.
  std::mt19937_64 engine(1);
  const double u = (static_cast<double>(engine() >> 11) + 0.5) * 0x1p-53;
  CHECK(first == inverse_normal_cdf(u));
}

TEST_CASE("generated counts, ids and metadata") {
  auto f = spec("f", 2.0, 1000);
  f.n_nontarget = 700;
  f.n_speakers = 4;
  const SyntheticCorpus c = generate(std::vector{f, spec("m", 2.0, 10)});
  const auto counts = c.trials.counts();
  REQUIRE(counts.size() == 2);
  CHECK(counts[0].n_target == 1000);
  CHECK(counts[0].n_nontarget == 700);
  CHECK(counts[1].total() == 20);
  CHECK(c.trials.speaker_counts()[0] == 4);
  CHECK(c.attributes == std::vector<std::string>{"gender"});
  CHECK(c.metadata.size() == 14);
  CHECK(c.trials.diagnostics.unknown_trials == 0);
}

TEST_CASE("synthetic files go through the regular parsers") {
  const SyntheticCorpus c =
      generate(std::vector{spec("f", 2.0, 300, 1), spec("m", 1.0, 200, 2)});
  std::ostringstream trials, meta;
  write_trials(trials, c.trials.records);
  write_metadata(meta, c.metadata);
  std::istringstream tin(trials.str()), min(meta.str());
  const TrialSet parsed = assign_subgroups(parse_trials(tin, "t"),
                                           parse_metadata(min, "m"),
                                           c.attributes);
  CHECK(parsed.records == c.trials.records);
  CHECK(parsed.subgroups == c.trials.subgroups);
  CHECK(parsed.subgroup_of == c.trials.subgroup_of);
}

TEST_CASE("spec validation") {
  auto bad = spec("f", 2.0, 10);
  bad.target_sd = 0.0;
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = spec("f", 2.0, 0);
  CHECK_THROWS_AS(generate(std::vector{bad}), InputError);
  bad = spec("f", 2.0, 10);
  bad.n_speakers = 0;
  CHECK_THROWS_AS(bad.validate(), InputError);
  CHECK_THROWS_AS(generate(std::vector{spec("f", 2.0, 10), spec("f", 1.0, 10)}),
                  InputError);
}

TEST_CASE("analytic_eer") {
  auto s = spec("f", 0.0, 10);
  CHECK(analytic_eer(s) == 0.5);
  s.target_mean = 2.0;
  CHECK(analytic_eer(s) == doctest::Approx(oracle::phi(-1.0)).epsilon(1e-14));
  CHECK(std::round(analytic_eer(s) * 1e6) == 158655.0);
  s.target_mean = 4.0;
  CHECK(std::round(analytic_eer(s) * 1e6) == 22750.0);
  s.target_sd = 2.0;
  CHECK_THROWS_WITH_AS(analytic_eer(s), doctest::Contains("brute"), InputError);
}

TEST_CASE("empirical EER tracks the closed form") {
  const SyntheticCorpus zero = generate(std::vector{spec("f", 0.0, 10000, 9)});
  std::vector<double> t, n;
  split(zero.trials, t, n);
  CHECK(std::fabs(eer(compute_error_curve(t, n)) - 0.5) <= 0.02);

  const auto gap = spec("f", 2.0, 20000, 10);
  const SyntheticCorpus c = generate(std::vector{gap});
  t.clear();
  n.clear();
  split(c.trials, t, n);
  CHECK(std::fabs(eer(compute_error_curve(t, n)) - analytic_eer(gap)) <= 0.01);
}

TEST_CASE("brute_force_min_dcf") {
  const std::vector<double> t{0.4, 0.8}, n{0.2, 0.6};
  const OperatingPoint p = brute_force_min_dcf(t, n, {});
  CHECK(p.cost == 0.025);
  CHECK(p.fpr == 0.0);
  CHECK(p.fnr == 0.5);
  // Any threshold in (0.6, 0.8] gives this point; the candidate rule takes
  // the lowest distinct score, 0.8.
  CHECK(p.threshold == 0.8);
  CHECK(operating_point_at(compute_error_curve(t, n), 0.7, {}).cost == 0.025);

  const std::vector<double> sep_t{1.0, 2.0}, sep_n{-1.0, 0.0};
  CHECK(brute_force_min_dcf(sep_t, sep_n, {}).cost == 0.0);

  const std::vector<double> none;
  CHECK_THROWS_AS(brute_force_min_dcf(none, n, {}), EvaluationError);
  const std::vector<double> big(10001, 0.0);
  CHECK_THROWS_AS(brute_force_min_dcf(big, n, {}), InputError);
}

TEST_CASE("brute force agrees with min_dcf on synthetic sets") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SyntheticCorpus c =
        generate(std::vector{spec("f", 1.0 + 0.1 * seed, 300, seed)});
    std::vector<double> t, n;
    split(c.trials, t, n);
    const OperatingPoint fast = min_dcf(compute_error_curve(t, n), {});
    const OperatingPoint slow = brute_force_min_dcf(t, n, {});
    CHECK(fast.cost == slow.cost);
    CHECK(fast.threshold == slow.threshold);
  }
}

}  // namespace
}  // namespace svbias
