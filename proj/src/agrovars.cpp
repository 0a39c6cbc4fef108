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
#include "vinemark/agrovars.hpp"

#include "vinemark/error.hpp"

namespace vinemark {

namespace {

void require_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(ErrorCode::kInvalidParameter, std::string(name) + " must lie in [0, 1]");
  }
}

}  // namespace

void PlantAssumptions::validate() const {
  if (!(buds_per_plant > 0.0 && bud_diameter_mm > 0.0 && internode_mm > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "plant assumptions must be positive");
  }
}

BudCountError bud_count_error(const PlantAssumptions& assumptions, double p_d,
                              double r_d) {
  assumptions.validate();
  require_unit(p_d, "p_d");
  require_unit(r_d, "r_d");
  if (p_d == 0.0) {
    throw Error(ErrorCode::kUndefinedCount,
                "excess count is undefined when detection precision is 0");
  }
  BudCountError e;
  const double detected_true = assumptions.buds_per_plant * r_d;
  e.omitted = assumptions.buds_per_plant * (1.0 - r_d);
  e.excess = detected_true * (1.0 / p_d - 1.0);
  e.net = e.excess - e.omitted;
  return e;
}

AreaErrorBreakdown area_error(double na_mean, double p_s_tp, double p_s_split) {
  if (!(na_mean >= 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "mean NA must be non-negative");
  }
  require_unit(p_s_tp, "p_s_tp");
  require_unit(p_s_split, "p_s_split");
  AreaErrorBreakdown b;
  b.fa_na_mean = na_mean;
  b.tp_precision_complement = 1.0 - p_s_tp;
  b.split_precision_complement = 1.0 - p_s_split;
  b.fpx = b.fa_na_mean + b.tp_precision_complement + b.split_precision_complement;
  return b;
}

double internode_error(const PlantAssumptions& assumptions, double nd_mean) {
  assumptions.validate();
  if (!(nd_mean >= 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "mean ND must be non-negative");
  }
  return 2.0 * nd_mean * assumptions.bud_diameter_mm / assumptions.internode_mm;
}

}  // namespace vinemark
