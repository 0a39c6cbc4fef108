// Copyright 2026 The Vinemark Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef VINEMARK_AGROVARS_HPP
#define VINEMARK_AGROVARS_HPP

namespace vinemark {

/// Field-level constants used to translate detection metrics into errors on
/// measured plant variables.
struct PlantAssumptions {
  double buds_per_plant = 240.0;
  double bud_diameter_mm = 5.0;
  double internode_mm = 150.0;

  void validate() const;
};

struct BudCountError {
  double excess = 0.0;   // false-positive buds counted per plant
  double omitted = 0.0;  // true buds missed per plant
  double net = 0.0;      // excess - omitted
};

/// p_d must be positive; r_d may be zero.
BudCountError bud_count_error(const PlantAssumptions& assumptions, double p_d,
                              double r_d);

/// False-negative pixels are assumed zero. False-positive pixels add the mean
/// false-alarm NA to the precision complements of true positives and splits,
/// even though the NA is normalized by bud area and the precisions by
/// detected area.
struct AreaErrorBreakdown {
  double fnx = 0.0;
  double fpx = 0.0;
  double fa_na_mean = 0.0;
  double tp_precision_complement = 0.0;
  double split_precision_complement = 0.0;
};

AreaErrorBreakdown area_error(double na_mean, double p_s_tp, double p_s_split);

/// Relative internode-length error when both endpoints are displaced by a
/// false alarm at the mean normalized distance.
double internode_error(const PlantAssumptions& assumptions, double nd_mean);

}  // namespace vinemark

#endif  // VINEMARK_AGROVARS_HPP
