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

// Reference VoxCeleb 1-H values for the ResNetSE34V2 baseline, used as
// fixed inputs for ratio reproduction.

#ifndef SVBIAS_TESTS_REFERENCE_TABLES_HPP_
#define SVBIAS_TESTS_REFERENCE_TABLES_HPP_

#include <array>
#include <cmath>

namespace svbias::reference {

inline constexpr double kOverallCost = 0.154;

struct CostRow {
  const char* subgroup;
  int speakers;
  double cost_at_overall_min;  // 3 decimals
  double subgroup_bias;
  double cost_at_own_min;
  double threshold_bias;
};

inline constexpr std::array<CostRow, 18> kCostTable{{
    {"mexico_m", 5, 0.090, 0.5768, 0.090, 1.0000},
    {"newzealand_m", 6, 0.104, 0.6668, 0.086, 1.2093},
    {"ireland_f", 5, 0.110, 0.7109, 0.070, 1.5714},
    {"canada_m", 29, 0.114, 0.7304, 0.104, 1.0962},
    {"usa_m", 431, 0.130, 0.8357, 0.122, 1.0656},
    {"australia_m", 25, 0.140, 0.9020, 0.136, 1.0294},
    {"usa_f", 368, 0.142, 0.9224, 0.140, 1.0143},
    {"uk_m", 127, 0.148, 0.9523, 0.140, 1.0571},
    {"ireland_m", 13, 0.162, 1.0432, 0.160, 1.0125},
    {"australia_f", 12, 0.178, 1.1523, 0.154, 1.1558},
    {"india_m", 15, 0.190, 1.2200, 0.144, 1.3194},
    {"germany_f", 5, 0.208, 1.3359, 0.184, 1.1304},
    {"canada_f", 25, 0.224, 1.4501, 0.202, 1.1089},
    {"uk_f", 88, 0.226, 1.4558, 0.172, 1.3140},
    {"norway_f", 7, 0.228, 1.4711, 0.210, 1.0857},
    {"italy_f", 5, 0.276, 1.7827, 0.104, 2.6538},
    {"norway_m", 13, 0.398, 2.5720, 0.396, 1.0051},
    {"india_f", 11, 0.400, 2.5766, 0.318, 1.2579},
}};

struct RateRatioRow {
  const char* subgroup;
  int speakers;
  double fpr_ratio;
  double fnr_ratio;
};

inline constexpr std::array<RateRatioRow, 18> kRateRatioTable{{
    {"mexico_m", 5, 0.0000, 0.8173},
    {"canada_m", 29, 0.5171, 0.9396},
    {"newzealand_m", 6, 0.5218, 0.8487},
    {"norway_f", 7, 0.6306, 1.9682},
    {"ireland_f", 5, 0.9037, 0.8408},
    {"usa_m", 431, 1.0000, 1.0000},
    {"australia_m", 25, 1.1055, 1.0745},
    {"germany_f", 5, 1.5023, 1.6162},
    {"ireland_m", 13, 1.6864, 1.1675},
    {"usa_f", 368, 2.0542, 0.9287},
    {"canada_f", 25, 3.1483, 1.4749},
    {"uk_m", 127, 3.5339, 0.6986},
    {"australia_f", 12, 5.6031, 0.6008},
    {"norway_m", 13, 6.0866, 2.5233},
    {"india_m", 15, 6.6852, 0.4975},
    {"uk_f", 88, 7.8514, 0.6168},
    {"italy_f", 5, 10.3484, 0.6202},
    {"india_f", 11, 13.0387, 1.2497},
}};

// Rounds to the given number of decimals the way the tables display.
inline double round_to(double x, int decimals) {
  double scale = 1.0;
  for (int i = 0; i < decimals; ++i) scale *= 10.0;
  return std::round(x * scale) / scale;
}

}  // namespace svbias::reference

#endif  // SVBIAS_TESTS_REFERENCE_TABLES_HPP_
