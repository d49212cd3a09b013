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

#ifndef SVBIAS_METRICS_HPP_
#define SVBIAS_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace svbias {

// Detection cost parameters:
//   C_det = c_fn * p_target * P_fn + c_fp * (1 - p_target) * P_fp
struct DcfConfig {
  double p_target = 0.05;
  double c_fn = 1.0;
  double c_fp = 1.0;
  std::string preset_name = "sre19";

  // Throws InputError unless 0 < p_target < 1, costs >= 0 and not both 0.
  void validate() const;
};

double dcf(double fpr, double fnr, const DcfConfig& config);

// dcf() divided by c_fp * (1 - p_target): w * P_fn + P_fp with
// w = (c_fn / c_fp) * (p_target / (1 - p_target)), or P_fn alone when c_fp is
// 0. Threshold selection and bias ratios use this form, so rescaling c_fn and
// c_fp by a common factor leaves them bit-identical.
double relative_cost(double fpr, double fnr, const DcfConfig& config);

// Error counts at a single threshold. Rates are kept as integer ratios so
// that aggregation over subgroups is exact.
struct ErrorCounts {
  std::uint64_t false_accepts = 0;  // nontargets with score >= threshold
  std::uint64_t n_nontarget = 0;
  std::uint64_t false_rejects = 0;  // targets with score < threshold
  std::uint64_t n_target = 0;

  double fpr() const;  // 0 when n_nontarget == 0
  double fnr() const;  // 0 when n_target == 0
};

struct OperatingPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double fnr = 0.0;
  double cost = 0.0;
  ErrorCounts counts;
};

// Threshold-indexed FPR/FNR step functions. Decision rule: accept iff
// score >= threshold. thresholds[0] is -inf (accept all) and
// thresholds.back() is +inf (reject all); between them every distinct
// observed score, ascending.
struct ErrorCurve {
  std::vector<double> thresholds;
  std::vector<std::uint64_t> false_accepts;
  std::vector<std::uint64_t> false_rejects;
  std::uint64_t n_target = 0;
  std::uint64_t n_nontarget = 0;

  std::size_t size() const { return thresholds.size(); }
  double fpr(std::size_t i) const;
  double fnr(std::size_t i) const;
  std::vector<double> fpr_values() const;
  std::vector<double> fnr_values() const;
  ErrorCounts counts(std::size_t i) const;
};

// Exact non-negative rational; used for EER so independent routes can be
// compared without floating-point slack.
class Fraction {
 public:
  Fraction() = default;
  Fraction(__int128 numerator, __int128 denominator);

  __int128 numerator() const { return num_; }
  __int128 denominator() const { return den_; }
  double to_double() const;

  friend bool operator==(const Fraction&, const Fraction&) = default;

 private:
  __int128 num_ = 0;
  __int128 den_ = 1;
};

// Throws EvaluationError naming the empty side, or InputError on a
// non-finite score.
ErrorCurve compute_error_curve(std::span<const double> targets,
                               std::span<const double> nontargets);

// Equal error rate. Exact crossing when some curve point has FPR == FNR,
// otherwise linear interpolation between the two points that bracket the
// sign change of FNR - FPR.
Fraction eer_exact(const ErrorCurve& curve);
double eer(const ErrorCurve& curve);

OperatingPoint point_at_index(const ErrorCurve& curve, std::size_t i,
                              const DcfConfig& config);

// Minimum-cost curve point; ties go to the smallest threshold.
OperatingPoint min_dcf(const ErrorCurve& curve, const DcfConfig& config);

// Reads the curve at an arbitrary threshold (±inf allowed, NaN rejected).
OperatingPoint operating_point_at(const ErrorCurve& curve, double threshold,
                                  const DcfConfig& config);

// Counts for raw score lists; either side may be empty.
ErrorCounts error_counts_at(std::span<const double> targets,
                            std::span<const double> nontargets,
                            double threshold);

// `threshold,fpr,fnr` rows, 9 significant digits.
void write_error_curve_csv(std::ostream& out, const ErrorCurve& curve);

}  // namespace svbias

#endif  // SVBIAS_METRICS_HPP_
