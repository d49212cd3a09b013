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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "svbias/det.hpp"
#include "svbias/error.hpp"
#include "text_util.hpp"

namespace svbias {

namespace {

std::string id_safe(const std::string& label) {
  std::string out;
  for (unsigned char c : label) {
    out += std::isalnum(c) ? static_cast<char>(c) : '-';
  }
  return out;
}

std::string zero_pad(std::size_t v, int width) {
  std::string s = std::to_string(v);
  if (static_cast<int>(s.size()) < width) {
    s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
  }
  return s;
}

}  // namespace

void SubgroupScoreSpec::validate() const {
  if (key.is_unknown()) throw InputError("synthetic spec needs a subgroup key");
  if (!(target_sd > 0.0) || !(nontarget_sd > 0.0)) {
    throw InputError("synthetic spec " + key.label() + ": sds must be > 0");
  }
  if (!std::isfinite(target_mean) || !std::isfinite(nontarget_mean) ||
      !std::isfinite(target_sd) || !std::isfinite(nontarget_sd)) {
    throw InputError("synthetic spec " + key.label() + ": non-finite moment");
  }
  if (n_target == 0 || n_nontarget == 0 || n_speakers == 0) {
    throw InputError("synthetic spec " + key.label() + ": counts must be > 0");
  }
}

double NormalStream::next() {
  const std::uint64_t bits = engine_() >> 11;
  const double u = (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  return inverse_normal_cdf(u);
}

SyntheticCorpus generate(std::span<const SubgroupScoreSpec> specs) {
  if (specs.empty()) throw InputError("no synthetic subgroup specs");
  SyntheticCorpus corpus;
  for (const auto& [name, value] : specs.front().key.parts()) {
    corpus.attributes.push_back(name);
  }
  std::set<std::string> keys;
  for (const SubgroupScoreSpec& spec : specs) {
    spec.validate();
    std::vector<std::string> names;
    for (const auto& [name, value] : spec.key.parts()) names.push_back(name);
    if (names != corpus.attributes) {
      throw InputError("synthetic specs disagree on attributes: [" +
                       join(corpus.attributes, ",") + "] vs [" +
                       join(names, ",") + "]");
    }
    if (!keys.insert(spec.key.canonical()).second) {
      throw InputError("duplicate synthetic subgroup " + spec.key.label());
    }
  }

  std::vector<SpeakerMetadata> speakers;
  std::vector<TrialRecord>& records = corpus.trials.records;
  for (std::size_t g = 0; g < specs.size(); ++g) {
    const SubgroupScoreSpec& spec = specs[g];
    const std::string prefix = "g" + zero_pad(g, 2) + "-" + id_safe(spec.key.label());
    std::vector<std::string> ids;
    for (std::size_t k = 0; k < spec.n_speakers; ++k) {
      SpeakerMetadata meta;
      meta.speaker_id = prefix + "-s" + zero_pad(k, 3);
      for (const auto& [name, value] : spec.key.parts()) {
        meta.attributes.emplace(name, value);
      }
      ids.push_back(meta.speaker_id);
      speakers.push_back(std::move(meta));
    }
    const std::string impostor = prefix + "-imp";

    NormalStream normal(spec.seed);
    std::size_t utt = 0;
    auto utterance = [&](const std::string& speaker) {
      return speaker + "/syn/" + zero_pad(utt++, 6) + ".wav";
    };
    for (std::size_t i = 0; i < spec.n_target; ++i) {
      const std::string& spk = ids[i % ids.size()];
      TrialRecord r;
      r.label = Label::kTarget;
      r.enroll_utterance = utterance(spk);
      r.test_utterance = utterance(spk);
      r.score = spec.target_mean + spec.target_sd * normal.next();
      records.push_back(std::move(r));
    }
    for (std::size_t i = 0; i < spec.n_nontarget; ++i) {
      const std::size_t k = i % ids.size();
      TrialRecord r;
      r.label = Label::kNontarget;
      r.enroll_utterance = utterance(ids[k]);
      r.test_utterance =
          utterance(ids.size() > 1 ? ids[(k + 1) % ids.size()] : impostor);
      r.score = spec.nontarget_mean + spec.nontarget_sd * normal.next();
      records.push_back(std::move(r));
    }
  }

  std::ostringstream serialized;
  write_trials(serialized, records);
  corpus.trials.provenance.paths.push_back("<synthetic>");
  corpus.trials.provenance.checksum = fnv1a64(serialized.str());
  corpus.metadata = MetadataTable(corpus.attributes, std::move(speakers));
  corpus.trials = assign_subgroups(std::move(corpus.trials), corpus.metadata,
                                   corpus.attributes);
  return corpus;
}

double analytic_eer(const SubgroupScoreSpec& spec) {
  spec.validate();
  if (spec.target_sd != spec.nontarget_sd) {
    throw InputError(
        "analytic EER needs equal target/nontarget sds; use the empirical "
        "curve or brute_force_min_dcf for unequal sds");
  }
  return normal_cdf(-(spec.target_mean - spec.nontarget_mean) /
                    (2.0 * spec.target_sd));
}

OperatingPoint brute_force_min_dcf(std::span<const double> targets,
                                   std::span<const double> nontargets,
                                   const DcfConfig& config) {
  if (targets.size() + nontargets.size() > 10000) {
    throw InputError("brute-force oracle is limited to 10,000 trials");
  }
  if (targets.empty()) throw EvaluationError("no target scores");
  if (nontargets.empty()) throw EvaluationError("no nontarget scores");

  std::vector<double> candidates;
  candidates.push_back(-std::numeric_limits<double>::infinity());
  std::vector<double> observed(targets.begin(), targets.end());
  observed.insert(observed.end(), nontargets.begin(), nontargets.end());
  std::sort(observed.begin(), observed.end());
  observed.erase(std::unique(observed.begin(), observed.end()), observed.end());
  candidates.insert(candidates.end(), observed.begin(), observed.end());
  candidates.push_back(std::numeric_limits<double>::infinity());

  // Candidates are ranked on cost / (c_fp (1 - p)), as min_dcf does.
  const double w =
      config.c_fp == 0.0
          ? 0.0
          : (config.c_fn / config.c_fp) *
                (config.p_target / (1.0 - config.p_target));
  OperatingPoint best;
  double best_rank = 0.0;
  bool have = false;
  for (double theta : candidates) {
    std::uint64_t fr = 0, fa = 0;
    for (double s : targets) {
      if (!(s >= theta)) ++fr;
    }
    for (double s : nontargets) {
      if (s >= theta) ++fa;
    }
    const double fnr =
        static_cast<double>(fr) / static_cast<double>(targets.size());
    const double fpr =
        static_cast<double>(fa) / static_cast<double>(nontargets.size());
    const double cost = config.c_fn * config.p_target * fnr +
                        config.c_fp * (1.0 - config.p_target) * fpr;
    const double rank = config.c_fp == 0.0 ? fnr : w * fnr + fpr;
    if (!have || rank < best_rank) {
      have = true;
      best_rank = rank;
      best.threshold = theta;
      best.fpr = fpr;
      best.fnr = fnr;
      best.cost = cost;
      best.counts = {fa, nontargets.size(), fr, targets.size()};
    }
  }
  return best;
}

}  // namespace svbias
