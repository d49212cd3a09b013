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

// Reference computations used only by tests. Nothing here calls into the
// metric implementations it is used to check.

#ifndef SVBIAS_TESTS_ORACLES_HPP_
#define SVBIAS_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace svbias::oracle {

struct Counts {
  std::uint64_t false_accepts = 0;
  std::uint64_t false_rejects = 0;
};

// Direct count under "accept iff score >= threshold".
inline Counts count_at(std::span<const double> targets,
                       std::span<const double> nontargets, double threshold) {
  Counts c;
  for (double s : targets) {
    if (s < threshold) ++c.false_rejects;
  }
  for (double s : nontargets) {
    if (s >= threshold) ++c.false_accepts;
  }
  return c;
}

inline std::vector<double> candidate_thresholds(std::span<const double> targets,
                                                std::span<const double> nontargets) {
  std::vector<double> all(targets.begin(), targets.end());
  all.insert(all.end(), nontargets.begin(), nontargets.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  all.insert(all.begin(), -std::numeric_limits<double>::infinity());
  all.push_back(std::numeric_limits<double>::infinity());
  return all;
}

// EER as an unreduced rational num/den: walk candidates, find the first
// point where FNR >= FPR and intersect the segment from the previous point
// with the FPR = FNR line.
inline std::pair<__int128, __int128> eer(std::span<const double> targets,
                                         std::span<const double> nontargets) {
  const __int128 nt = targets.size(), nn = nontargets.size();
  const std::vector<double> cands = candidate_thresholds(targets, nontargets);
  __int128 a_prev = 0, g_prev = 0;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const Counts c = count_at(targets, nontargets, cands[i]);
    const __int128 a = static_cast<__int128>(c.false_accepts) * nt;  // fpr*nn*nt
    const __int128 b = static_cast<__int128>(c.false_rejects) * nn;  // fnr*nn*nt
    const __int128 g = a - b;  // fpr - fnr, scaled
    if (g <= 0) {
      if (g == 0) return {a, nn * nt};
      const __int128 den = (g_prev - g) * nn * nt;
      const __int128 num = a_prev * (g_prev - g) + g_prev * (a - a_prev);
      return {num, den};
    }
    a_prev = a;
    g_prev = g;
  }
  return {0, 1};
}

inline bool same_rational(std::pair<__int128, __int128> x, __int128 num,
                          __int128 den) {
  return x.first * den == num * x.second;
}

// Φ from the complementary error function; upper tail used for x > 0.
inline double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double phi_upper(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// Φ^-1 by bisection to the limit of double resolution.
inline double inverse_phi(double p) {
  const bool upper = p > 0.5;
  const double target = upper ? 1.0 - p : p;
  // Solve phi(x) = target on x <= 0, then mirror.
  double lo = -40.0, hi = 0.0;
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (phi(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double x = 0.5 * (lo + hi);
  return upper ? -x : x;
}

// Scores on a coarse lattice so ties are common.
inline std::vector<double> lattice_scores(std::mt19937_64& rng, std::size_t n,
                                          int lo, int hi, double step) {
  std::uniform_int_distribution<int> dist(lo, hi);
  std::vector<double> out(n);
  for (double& s : out) s = dist(rng) * step;
  return out;
}

}  // namespace svbias::oracle

#endif  // SVBIAS_TESTS_ORACLES_HPP_
