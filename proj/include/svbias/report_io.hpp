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

#ifndef SVBIAS_REPORT_IO_HPP_
#define SVBIAS_REPORT_IO_HPP_

#include <iosfwd>
#include <string>
#include <string_view>

#include "svbias/bias.hpp"
#include "svbias/trial_data.hpp"

namespace svbias {

// Literal used for zero-denominator ratios in every output format.
inline constexpr std::string_view kUndefined = "undefined";

std::string format_number(double value);  // 9 significant digits
std::string format_ratio(const Ratio& ratio, int decimals = -1);

// Nested JSON, two-space indent, trailing newline.
std::string report_to_json(const BiasReport& report);
// Inverse of report_to_json for the fields compare_runs needs (curves are
// not serialized).
BiasReport report_from_json(std::string_view json);

// One row per subgroup:
// subgroup,n_speakers,n_target,n_nontarget,fpr,fnr,cdet_at_overall,
// cdet_at_own_min,subgroup_bias,threshold_bias,fpr_ratio,fnr_ratio,low_support
void write_report_csv(std::ostream& out, const BiasReport& report);

void write_composition_csv(std::ostream& out, const CompositionReport& report);

// subgroup,bias_a,bias_b
void write_comparison_csv(std::ostream& out, const RunComparison& comparison);

}  // namespace svbias

#endif  // SVBIAS_REPORT_IO_HPP_
