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

#include "svbias/det.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "svbias/error.hpp"
#include "svg.hpp"
#include "text_util.hpp"

namespace svbias {

namespace {

// Wichura (1988), Algorithm AS241 PPND16.
constexpr double kA[] = {3.3871328727963666080e0,  1.3314166789178437745e+2,
                         1.9715909503065514427e+3, 1.3731693765509461125e+4,
                         4.5921953931549871457e+4, 6.7265770927008700853e+4,
                         3.3430575583588128105e+4, 2.5090809287301226727e+3};
constexpr double kB[] = {1.0,
                         4.2313330701600911252e+1, 6.8718700749205790830e+2,
                         5.3941960214247511077e+3, 2.1213794301586595867e+4,
                         3.9307895800092710610e+4, 2.8729085735721942674e+4,
                         5.2264952788528545610e+3};
constexpr double kC[] = {1.42343711074968357734e0, 4.63033784615654529590e0,
                         5.76949722146069140550e0, 3.64784832476320460504e0,
                         1.27045825245236838258e0, 2.41780725177450611770e-1,
                         2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr double kD[] = {1.0,
                         2.05319162663775882187e0, 1.67638483018380384940e0,
                         6.89767334985100004550e-1, 1.48103976427480074590e-1,
                         1.51986665636164571966e-2, 5.47593808499534494600e-4,
                         1.05075007164441684324e-9};
constexpr double kE[] = {6.65790464350110377720e0, 5.46378491116411436990e0,
                         1.78482653991729133580e0, 2.96560571828504891230e-1,
                         2.65321895265761230930e-2, 1.24266094738807843860e-3,
                         2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr double kF[] = {1.0,
                         5.99832206555887937690e-1, 1.36929880922735805310e-1,
                         1.48753612908506148525e-2, 7.86869131145613259100e-4,
                         1.84631831751005468180e-5, 1.42151175831644588870e-7,
                         2.04426310338993978564e-15};

double horner(const double (&c)[8], double x) {
  double acc = c[7];
  for (int i = 6; i >= 0; --i) acc = acc * x + c[i];
  return acc;
}

struct Frame {
  double left, top, width, height;
  double lo, hi;  // deviate range on both axes

  double x(double d) const { return left + (d - lo) / (hi - lo) * width; }
  double y(double d) const { return top + height - (d - lo) / (hi - lo) * height; }
};

std::string tick_label(double percent) {
  return format_printf("%g", percent);
}

void append_marker(std::string& out, const DetMarker& m, const Frame& f,
                   std::string_view colour) {
  const double cx = f.x(m.fpr_deviate), cy = f.y(m.fnr_deviate);
  const std::string c(colour);
  if (m.kind == MarkerKind::kOverallMin) {
    out += "    <path class=\"marker triangle\" d=\"M" + svg::num(cx) + " " +
           svg::num(cy - 6) + " L" + svg::num(cx + 5.5) + " " +
           svg::num(cy + 4) + " L" + svg::num(cx - 5.5) + " " +
           svg::num(cy + 4) + " Z\" fill=\"" + c + "\"/>\n";
  } else {
    out += "    <path class=\"marker cross\" d=\"M" + svg::num(cx - 5) + " " +
           svg::num(cy - 5) + " L" + svg::num(cx + 5) + " " + svg::num(cy + 5) +
           " M" + svg::num(cx - 5) + " " + svg::num(cy + 5) + " L" +
           svg::num(cx + 5) + " " + svg::num(cy - 5) + "\" stroke=\"" + c +
           "\" stroke-width=\"2\" fill=\"none\"/>\n";
  }
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double inverse_normal_cdf(double p) {
  if (std::isnan(p) || p < 0.0 || p > 1.0) {
    throw InputError("probability outside [0, 1]: " + format_round_trip(p));
  }
  if (p == 0.0) return -std::numeric_limits<double>::infinity();
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * horner(kA, r) / horner(kB, r);
  }
  double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = horner(kC, r) / horner(kD, r);
  } else {
    r -= 5.0;
    x = horner(kE, r) / horner(kF, r);
  }
  return q < 0.0 ? -x : x;
}

double probit(double p, const ClampBand& band) {
  if (std::isnan(p)) throw InputError("probit of NaN");
  if (p < 0.0 || p > 1.0) {
    throw InputError("probit argument outside [0, 1]: " + format_round_trip(p));
  }
  return inverse_normal_cdf(std::clamp(p, band.lo, band.hi));
}

DetMarker make_marker(MarkerKind kind, const OperatingPoint& point,
                      const ClampBand& band) {
  return {kind, point, probit(point.fpr, band), probit(point.fnr, band)};
}

DetCurve det_curve(const ErrorCurve& curve, std::string source,
                   std::span<const DetMarker> markers, const ClampBand& band) {
  DetCurve det;
  det.source = std::move(source);
  det.markers.assign(markers.begin(), markers.end());
  // Descending threshold = ascending FPR; FNR is non-increasing along the way,
  // so a repeated FPR deviate is replaced by the later (lower-FNR) point.
  for (std::size_t k = curve.size(); k-- > 0;) {
    DetPoint p;
    p.fpr = curve.fpr(k);
    p.fnr = curve.fnr(k);
    p.fpr_deviate = probit(p.fpr, band);
    p.fnr_deviate = probit(p.fnr, band);
    if (!det.points.empty() && det.points.back().fpr_deviate == p.fpr_deviate) {
      det.points.back() = p;
    } else {
      det.points.push_back(p);
    }
  }
  return det;
}

std::vector<DetCurve> det_curves(const BiasReport& report,
                                 const ClampBand& band) {
  std::vector<DetCurve> curves;
  if (report.overall_curve.size() > 0) {
    const DetMarker m = make_marker(MarkerKind::kOverallMin, report.overall, band);
    DetCurve overall = det_curve(report.overall_curve, "overall",
                                 std::span<const DetMarker>(&m, 1), band);
    overall.overall = true;
    curves.push_back(std::move(overall));
  }
  for (const SubgroupResult& r : report.subgroups) {
    if (r.curve.size() == 0) continue;
    const DetMarker markers[] = {
        make_marker(MarkerKind::kOverallMin, r.op_at_overall, band),
        make_marker(MarkerKind::kSubgroupMin, r.op_at_own_min, band)};
    curves.push_back(det_curve(r.curve, r.key.label(), markers, band));
  }
  return curves;
}

void write_det_csv(std::ostream& out, const DetCurve& curve) {
  out << "fpr,fnr,fpr_deviate,fnr_deviate\n";
  for (const DetPoint& p : curve.points) {
    out << format_printf("%.9g", p.fpr) << ',' << format_printf("%.9g", p.fnr)
        << ',' << format_printf("%.9g", p.fpr_deviate) << ','
        << format_printf("%.9g", p.fnr_deviate) << '\n';
  }
}

std::string render_det_svg(std::span<const DetCurve> curves,
                           const PlotStyle& style) {
  if (curves.empty()) throw InputError("nothing to plot: no DET curves");
  if (!(style.axis_min > 0.0 && style.axis_min < style.axis_max &&
        style.axis_max < 1.0)) {
    throw InputError("DET axis range must satisfy 0 < min < max < 1");
  }
  const double legend_width = 190;
  Frame f{70, 40, style.width - 70 - legend_width - 20.0,
          style.height - 40 - 60.0, inverse_normal_cdf(style.axis_min),
          inverse_normal_cdf(style.axis_max)};

  std::string out = svg::header(style.width, style.height);
  out += "  <title>" + svg::escape(style.title) + "</title>\n";
  out += "  <defs><clipPath id=\"plot-area\"><rect x=\"" + svg::num(f.left) +
         "\" y=\"" + svg::num(f.top) + "\" width=\"" + svg::num(f.width) +
         "\" height=\"" + svg::num(f.height) + "\"/></clipPath></defs>\n";
  out += "  <rect class=\"frame\" x=\"" + svg::num(f.left) + "\" y=\"" +
         svg::num(f.top) + "\" width=\"" + svg::num(f.width) + "\" height=\"" +
         svg::num(f.height) + "\" fill=\"white\" stroke=\"black\"/>\n";

  out += "  <g class=\"ticks\" font-size=\"11\">\n";
  for (double pct : style.tick_percents) {
    const double rate = pct / 100.0;
    if (rate < style.axis_min || rate > style.axis_max) continue;
    const double d = inverse_normal_cdf(rate);
    const double x = f.x(d), y = f.y(d);
    const std::string label = tick_label(pct);
    out += "    <line x1=\"" + svg::num(x) + "\" y1=\"" + svg::num(f.top) +
           "\" x2=\"" + svg::num(x) + "\" y2=\"" + svg::num(f.top + f.height) +
           "\" stroke=\"#dddddd\"/>\n";
    out += "    <line x1=\"" + svg::num(f.left) + "\" y1=\"" + svg::num(y) +
           "\" x2=\"" + svg::num(f.left + f.width) + "\" y2=\"" + svg::num(y) +
           "\" stroke=\"#dddddd\"/>\n";
    out += "    <text class=\"xtick\" x=\"" + svg::num(x) + "\" y=\"" +
           svg::num(f.top + f.height + 16) + "\" text-anchor=\"middle\">" +
           label + "</text>\n";
    out += "    <text class=\"ytick\" x=\"" + svg::num(f.left - 6) + "\" y=\"" +
           svg::num(y + 4) + "\" text-anchor=\"end\">" + label + "</text>\n";
  }
  out += "  </g>\n";
  out += "  <text x=\"" + svg::num(f.left + f.width / 2) + "\" y=\"" +
         svg::num(f.top + f.height + 40) +
         "\" text-anchor=\"middle\" font-size=\"13\">False positive rate "
         "(%)</text>\n";
  out += "  <text x=\"18\" y=\"" + svg::num(f.top + f.height / 2) +
         "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 " +
         svg::num(f.top + f.height / 2) +
         ")\">False negative rate (%)</text>\n";
  out += "  <text x=\"" + svg::num(f.left + f.width / 2) +
         "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
         svg::escape(style.title) + "</text>\n";

  out += "  <g class=\"curves\" clip-path=\"url(#plot-area)\">\n";
  std::size_t colour_index = 0;
  std::vector<std::string> colours;
  for (const DetCurve& c : curves) {
    const std::string colour =
        c.overall ? std::string("black") : std::string(svg::colour(colour_index++));
    colours.push_back(colour);
    std::string pts;
    for (const DetPoint& p : c.points) {
      if (!pts.empty()) pts += ' ';
      pts += svg::num(f.x(p.fpr_deviate)) + "," + svg::num(f.y(p.fnr_deviate));
    }
    out += "    <polyline class=\"series\" data-source=\"" +
           svg::escape(c.source) + "\" points=\"" + pts +
           "\" fill=\"none\" stroke=\"" + colour + "\" stroke-width=\"" +
           (c.overall ? "2" : "1.5") + "\"" +
           (c.overall ? " stroke-dasharray=\"2,3\"" : "") + "/>\n";
    for (const DetMarker& m : c.markers) append_marker(out, m, f, colour);
  }
  out += "  </g>\n";

  out += "  <g class=\"legend\" font-size=\"11\">\n";
  const double lx = f.left + f.width + 20;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const double ly = f.top + 8 + 16.0 * static_cast<double>(i);
    out += "    <g class=\"legend-entry\"><line x1=\"" + svg::num(lx) +
           "\" y1=\"" + svg::num(ly) + "\" x2=\"" + svg::num(lx + 24) +
           "\" y2=\"" + svg::num(ly) + "\" stroke=\"" + colours[i] +
           "\" stroke-width=\"2\"" +
           (curves[i].overall ? " stroke-dasharray=\"2,3\"" : "") +
           "/><text x=\"" + svg::num(lx + 30) + "\" y=\"" + svg::num(ly + 4) +
           "\">" + svg::escape(curves[i].source) + "</text></g>\n";
  }
  out += "  </g>\n</svg>\n";
  return out;
}

void render(std::span<const DetCurve> curves, const PlotStyle& style,
            const std::filesystem::path& out) {
  const std::string bytes = render_det_svg(curves, style);
  std::ofstream file(out, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + out.string());
  file << bytes;
  file.close();
  if (!file) throw IoError("write failed for " + out.string());
}

std::string render_comparison_svg(const RunComparison& comparison,
                                  const std::string& name_a,
                                  const std::string& name_b) {
  const int width = 560, height = 560;
  const double left = 70, top = 40, size = 440;
  double hi = 2.0;
  for (const BiasPair& p : comparison.pairs) {
    if (p.bias_a) hi = std::max(hi, *p.bias_a);
    if (p.bias_b) hi = std::max(hi, *p.bias_b);
  }
  hi = std::ceil(hi * 2.0) / 2.0;
  auto sx = [&](double v) { return left + v / hi * size; };
  auto sy = [&](double v) { return top + size - v / hi * size; };

  std::string out = svg::header(width, height);
  out += "  <title>subgroup bias comparison</title>\n";
  out += "  <rect class=\"frame\" x=\"" + svg::num(left) + "\" y=\"" +
         svg::num(top) + "\" width=\"" + svg::num(size) + "\" height=\"" +
         svg::num(size) + "\" fill=\"white\" stroke=\"black\"/>\n";
  out += "  <g class=\"ticks\" font-size=\"11\">\n";
  for (double v = 0.0; v <= hi + 1e-9; v += 0.5) {
    const std::string label = format_printf("%.1f", v);
    out += "    <text x=\"" + svg::num(sx(v)) + "\" y=\"" +
           svg::num(top + size + 16) + "\" text-anchor=\"middle\">" + label +
           "</text>\n";
    out += "    <text x=\"" + svg::num(left - 6) + "\" y=\"" +
           svg::num(sy(v) + 4) + "\" text-anchor=\"end\">" + label +
           "</text>\n";
  }
  out += "  </g>\n";
  out += "  <line class=\"diagonal\" x1=\"" + svg::num(sx(0)) + "\" y1=\"" +
         svg::num(sy(0)) + "\" x2=\"" + svg::num(sx(hi)) + "\" y2=\"" +
         svg::num(sy(hi)) + "\" stroke=\"#888888\" stroke-dasharray=\"4,4\"/>\n";
  out += "  <text x=\"" + svg::num(left + size / 2) + "\" y=\"" +
         svg::num(top + size + 40) +
         "\" text-anchor=\"middle\" font-size=\"13\">subgroup bias, " +
         svg::escape(name_a) + "</text>\n";
  out += "  <text x=\"18\" y=\"" + svg::num(top + size / 2) +
         "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 " +
         svg::num(top + size / 2) + ")\">subgroup bias, " +
         svg::escape(name_b) + "</text>\n";
  out += "  <g class=\"points\" font-size=\"10\">\n";
  for (const BiasPair& p : comparison.pairs) {
    if (!p.bias_a || !p.bias_b) continue;
    const double x = sx(*p.bias_a), y = sy(*p.bias_b);
    out += "    <circle class=\"point\" data-subgroup=\"" + svg::escape(p.label) +
           "\" cx=\"" + svg::num(x) + "\" cy=\"" + svg::num(y) +
           "\" r=\"4\" fill=\"#1f77b4\"/>\n";
    out += "    <text x=\"" + svg::num(x + 6) + "\" y=\"" + svg::num(y - 4) +
           "\">" + svg::escape(p.label) + "</text>\n";
  }
  out += "  </g>\n</svg>\n";
  return out;
}

}  // namespace svbias
