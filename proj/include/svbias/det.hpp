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

#ifndef SVBIAS_DET_HPP_
#define SVBIAS_DET_HPP_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "svbias/bias.hpp"
#include "svbias/metrics.hpp"

namespace svbias {

// Standard normal CDF.
double normal_cdf(double x);

// Unclamped inverse standard normal CDF (Wichura, AS241 PPND16; relative
// accuracy about 1e-16). Returns -inf/+inf at 0/1; throws on NaN or p
// outside [0, 1].
double inverse_normal_cdf(double p);

// Rates are clamped into [lo, hi] before the probit so DET axes stay finite.
struct ClampBand {
  double lo = 1e-6;
  double hi = 1.0 - 1e-6;
};

// Normal deviate of a rate, clamped to `band`. Plot-side only.
double probit(double p, const ClampBand& band = {});

enum class MarkerKind {
  kOverallMin,   // triangle
  kSubgroupMin,  // cross
};

struct DetMarker {
  MarkerKind kind = MarkerKind::kOverallMin;
  OperatingPoint point;
  double fpr_deviate = 0.0;
  double fnr_deviate = 0.0;
};

struct DetPoint {
  double fpr = 0.0;  // unclamped
  double fnr = 0.0;
  double fpr_deviate = 0.0;
  double fnr_deviate = 0.0;
};

// Points are strictly increasing in fpr_deviate; for each clamped FPR the
// lowest FNR is kept.
struct DetCurve {
  std::string source;  // subgroup label or "overall"
  bool overall = false;
  std::vector<DetPoint> points;
  std::vector<DetMarker> markers;
};

DetCurve det_curve(const ErrorCurve& curve, std::string source,
                   std::span<const DetMarker> markers = {},
                   const ClampBand& band = {});

// Builds a marker at `point` with its deviates filled in.
DetMarker make_marker(MarkerKind kind, const OperatingPoint& point,
                      const ClampBand& band = {});

// DET curves for the overall set (first, dotted) and every audited subgroup,
// with overall-min triangles and subgroup-min crosses.
std::vector<DetCurve> det_curves(const BiasReport& report,
                                 const ClampBand& band = {});

// `fpr,fnr,fpr_deviate,fnr_deviate` rows, 9 significant digits.
void write_det_csv(std::ostream& out, const DetCurve& curve);

struct PlotStyle {
  int width = 720;
  int height = 640;
  // Visible axis range (rates); points outside are clipped.
  double axis_min = 0.0005;
  double axis_max = 0.6;
  std::vector<double> tick_percents{0.1, 0.5, 1, 2, 5, 10, 20, 40};
  std::string title = "DET";
};

// SVG markup; identical inputs give identical bytes.
std::string render_det_svg(std::span<const DetCurve> curves,
                           const PlotStyle& style = {});
// Writes render_det_svg() to `out`; throws IoError when unwritable.
void render(std::span<const DetCurve> curves, const PlotStyle& style,
            const std::filesystem::path& out);

// Subgroup-bias scatter of run A (x) against run B (y) with the equality
// diagonal.
std::string render_comparison_svg(const RunComparison& comparison,
                                  const std::string& name_a = "run A",
                                  const std::string& name_b = "run B");

}  // namespace svbias

#endif  // SVBIAS_DET_HPP_
