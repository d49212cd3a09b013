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

#ifndef SVBIAS_SYNTH_HPP_
#define SVBIAS_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "svbias/metrics.hpp"
#include "svbias/trial_data.hpp"

namespace svbias {

// Gaussian score model for one subgroup.
struct SubgroupScoreSpec {
  SubgroupKey key;
  double target_mean = 2.0;
  double target_sd = 1.0;
  double nontarget_mean = 0.0;
  double nontarget_sd = 1.0;
  std::size_t n_target = 1000;
  std::size_t n_nontarget = 1000;
  std::uint64_t seed = 1;
  std::size_t n_speakers = 10;

  void validate() const;
};

// Standard normal draws from a fixed algorithm: std::mt19937_64 (whose
// output sequence the C++ standard pins) mapped to u in (0, 1) as
// ((x >> 11) + 0.5) * 2^-53, then z = inverse_normal_cdf(u).
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  std::mt19937_64 engine_;
};

struct SyntheticCorpus {
  TrialSet trials;  // subgroups assigned
  MetadataTable metadata;
  std::vector<std::string> attributes;
};

// Trials are emitted per spec, targets then nontargets. Utterance ids follow
// `<speaker>/syn/<n>.wav` so the default speaker rule resolves them; target
// trials pair a speaker with itself, nontargets with the next speaker of the
// same subgroup.
SyntheticCorpus generate(std::span<const SubgroupScoreSpec> specs);

// Φ(-(target_mean - nontarget_mean) / (2 sd)); requires equal sds.
double analytic_eer(const SubgroupScoreSpec& spec);

// Exhaustive O(n^2) reference for min_dcf: every distinct score and both
// virtual endpoints, counted directly. At most 10,000 trials.
OperatingPoint brute_force_min_dcf(std::span<const double> targets,
                                   std::span<const double> nontargets,
                                   const DcfConfig& config);

}  // namespace svbias

#endif  // SVBIAS_SYNTH_HPP_
