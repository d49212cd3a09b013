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

#include "svbias/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "svbias/error.hpp"
#include "text_util.hpp"

namespace svbias {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const __int128 r = a % b;
    a = b;
    b = r;
  }
  return a;
}

std::vector<double> sorted_finite(std::span<const double> scores,
                                  const char* side) {
  std::vector<double> out(scores.begin(), scores.end());
  for (double s : out) {
    if (!std::isfinite(s)) {
      throw InputError(std::string("non-finite ") + side + " score");
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

void DcfConfig::validate() const {
  if (!(p_target > 0.0 && p_target < 1.0)) {
    throw InputError("p_target must lie in (0, 1), got " +
                     format_round_trip(p_target));
  }
  if (!(c_fn >= 0.0) || !(c_fp >= 0.0) || !std::isfinite(c_fn) ||
      !std::isfinite(c_fp)) {
    throw InputError("c_fn and c_fp must be finite and non-negative");
  }
  if (c_fn == 0.0 && c_fp == 0.0) {
    throw InputError("c_fn and c_fp cannot both be zero");
  }
}

double dcf(double fpr, double fnr, const DcfConfig& config) {
  return config.c_fn * config.p_target * fnr +
         config.c_fp * (1.0 - config.p_target) * fpr;
}

double relative_cost(double fpr, double fnr, const DcfConfig& config) {
  if (config.c_fp == 0.0) return fnr;
  const double w =
      (config.c_fn / config.c_fp) * (config.p_target / (1.0 - config.p_target));
  return w * fnr + fpr;
}

double ErrorCounts::fpr() const { return ratio(false_accepts, n_nontarget); }
double ErrorCounts::fnr() const { return ratio(false_rejects, n_target); }

double ErrorCurve::fpr(std::size_t i) const {
  return ratio(false_accepts[i], n_nontarget);
}
double ErrorCurve::fnr(std::size_t i) const {
  return ratio(false_rejects[i], n_target);
}

std::vector<double> ErrorCurve::fpr_values() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = fpr(i);
  return out;
}

std::vector<double> ErrorCurve::fnr_values() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = fnr(i);
  return out;
}

ErrorCounts ErrorCurve::counts(std::size_t i) const {
  return {false_accepts[i], n_nontarget, false_rejects[i], n_target};
}

Fraction::Fraction(__int128 numerator, __int128 denominator) {
  if (denominator == 0) throw EvaluationError("zero denominator in fraction");
  if (denominator < 0) {
    numerator = -numerator;
    denominator = -denominator;
  }
  const __int128 g = gcd128(numerator, denominator);
  num_ = g ? numerator / g : 0;
  den_ = g ? denominator / g : 1;
}

double Fraction::to_double() const {
  return static_cast<double>(num_) / static_cast<double>(den_);
}

ErrorCurve compute_error_curve(std::span<const double> targets,
                               std::span<const double> nontargets) {
  if (targets.empty() && nontargets.empty()) {
    throw EvaluationError("no target and no nontarget scores");
  }
  if (targets.empty()) throw EvaluationError("no target scores");
  if (nontargets.empty()) throw EvaluationError("no nontarget scores");
  const std::vector<double> tar = sorted_finite(targets, "target");
  const std::vector<double> non = sorted_finite(nontargets, "nontarget");

  ErrorCurve curve;
  curve.n_target = tar.size();
  curve.n_nontarget = non.size();
  const std::size_t capacity = tar.size() + non.size() + 2;
  curve.thresholds.reserve(capacity);
  curve.false_accepts.reserve(capacity);
  curve.false_rejects.reserve(capacity);

  curve.thresholds.push_back(-kInf);
  curve.false_accepts.push_back(non.size());
  curve.false_rejects.push_back(0);

  // Merge walk: at threshold s, false rejects are targets < s and false
  // accepts are nontargets >= s.
  std::size_t ti = 0, ni = 0;
  while (ti < tar.size() || ni < non.size()) {
    const double s = (ni == non.size() || (ti < tar.size() && tar[ti] < non[ni]))
                         ? tar[ti]
                         : non[ni];
    curve.thresholds.push_back(s);
    curve.false_accepts.push_back(non.size() - ni);
    curve.false_rejects.push_back(ti);
    while (ti < tar.size() && tar[ti] == s) ++ti;
    while (ni < non.size() && non[ni] == s) ++ni;
  }

  curve.thresholds.push_back(kInf);
  curve.false_accepts.push_back(0);
  curve.false_rejects.push_back(tar.size());
  return curve;
}

Fraction eer_exact(const ErrorCurve& curve) {
  const __int128 nt = curve.n_target;
  const __int128 nn = curve.n_nontarget;
  // Work in units of 1/(nn*nt): fpr -> X = FA*nt, fnr -> Y = FR*nn.
  auto x_of = [&](std::size_t i) {
    return static_cast<__int128>(curve.false_accepts[i]) * nt;
  };
  auto y_of = [&](std::size_t i) {
    return static_cast<__int128>(curve.false_rejects[i]) * nn;
  };
  std::size_t i = 0;
  while (i < curve.size() && y_of(i) - x_of(i) < 0) ++i;
  if (i == curve.size() || i == 0) {
    throw EvaluationError("error curve has no FPR/FNR crossing");
  }
  if (y_of(i) == x_of(i)) {
    return Fraction(static_cast<__int128>(curve.false_accepts[i]), nn);
  }
  const __int128 x0 = x_of(i - 1), y0 = y_of(i - 1);
  const __int128 x1 = x_of(i), y1 = y_of(i);
  const __int128 d = (x1 - x0) - (y1 - y0);
  return Fraction(x0 * d + (y0 - x0) * (x1 - x0), d * nn * nt);
}

double eer(const ErrorCurve& curve) { return eer_exact(curve).to_double(); }

OperatingPoint point_at_index(const ErrorCurve& curve, std::size_t i,
                              const DcfConfig& config) {
  OperatingPoint op;
  op.threshold = curve.thresholds[i];
  op.counts = curve.counts(i);
  op.fpr = op.counts.fpr();
  op.fnr = op.counts.fnr();
  op.cost = dcf(op.fpr, op.fnr, config);
  return op;
}

OperatingPoint min_dcf(const ErrorCurve& curve, const DcfConfig& config) {
  std::size_t best = 0;
  double best_cost = kInf;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double cost = relative_cost(curve.fpr(i), curve.fnr(i), config);
    if (cost < best_cost) {
      best_cost = cost;
      best = i;
    }
  }
  return point_at_index(curve, best, config);
}

OperatingPoint operating_point_at(const ErrorCurve& curve, double threshold,
                                  const DcfConfig& config) {
  if (std::isnan(threshold)) throw InputError("threshold is NaN");
  // accept iff score >= θ, so the counts at θ are those at the first curve
  // threshold >= θ.
  auto it = std::lower_bound(curve.thresholds.begin(), curve.thresholds.end(),
                             threshold);
  OperatingPoint op = point_at_index(
      curve, static_cast<std::size_t>(it - curve.thresholds.begin()), config);
  op.threshold = threshold;
  return op;
}

ErrorCounts error_counts_at(std::span<const double> targets,
                            std::span<const double> nontargets,
                            double threshold) {
  ErrorCounts counts;
  counts.n_target = targets.size();
  counts.n_nontarget = nontargets.size();
  for (double s : targets) counts.false_rejects += s < threshold;
  for (double s : nontargets) counts.false_accepts += s >= threshold;
  return counts;
}

void write_error_curve_csv(std::ostream& out, const ErrorCurve& curve) {
  out << "threshold,fpr,fnr\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out << format_printf("%.9g", curve.thresholds[i]) << ','
        << format_printf("%.9g", curve.fpr(i)) << ','
        << format_printf("%.9g", curve.fnr(i)) << '\n';
  }
}

}  // namespace svbias
