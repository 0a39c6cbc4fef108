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
#ifndef VINEMARK_SYNTH_HPP
#define VINEMARK_SYNTH_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vinemark/metrics.hpp"
#include "vinemark/raster.hpp"

namespace vinemark {

enum class BudShape { kDisk, kEllipse, kRectangle };

/// A pixel belongs to the bud iff its centre falls inside the shape.
/// Ellipses have semi-axes `radius` and `radius * aspect`, rotated by
/// `angle` radians; rectangles are axis-aligned with half-width `radius` and
/// half-height `radius * aspect` (strict inequality).
struct BudSpec {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();  // (row, col)
  double radius = 1.0;
  BudShape shape = BudShape::kDisk;
  double aspect = 1.0;
  double angle = 0.0;

  static BudSpec disk(double row, double col, double radius);
  /// Exactly height x width pixels with the given top-left corner.
  static BudSpec rectangle(int top, int left, int height, int width);
};

struct SceneSpec {
  int width = 0;
  int height = 0;
  BudSpec bud;
  std::uint64_t rng_seed = 0;
};

BinaryMask rasterize_bud(const SceneSpec& spec);

GroundTruth make_truth(const SceneSpec& spec);

struct FalseAlarmSpec {
  double offset_diameters = 2.0;  // centre distance in bud diameters
  double area_fraction = 0.1;     // area relative to the bud
};

struct PerturbationSpec {
  int shift_rows = 0;
  int shift_cols = 0;
  int dilate_or_erode = 0;  // > 0 dilates, < 0 erodes (4-neighbourhood steps)
  int split_into = 1;
  std::vector<FalseAlarmSpec> false_alarms;
};

/// What the metrics should report for one generated component. `bbox`
/// identifies the component in the generated mask.
struct ExpectedComponent {
  BoundingBox bbox;
  VerdictKind kind = VerdictKind::kFalseAlarm;
  std::optional<double> iou;
  std::optional<double> normalized_area;
  std::optional<double> normalized_distance;
};

struct PerturbResult {
  BinaryMask mask;
  // The bud-derived body (when its verdict has a closed form) followed by
  // one entry per false alarm.
  std::vector<ExpectedComponent> expected;
};

/// Applies erode/dilate, shift, split, then places false-alarm squares. The
/// body's IoU is known in closed form for a pure shift of a rectangular bud.
PerturbResult perturb(const GroundTruth& truth, const PerturbationSpec& spec,
                      double alpha = 0.5);

/// A seeded scene plus detection, as used by the property and acceptance
/// suites.
struct SyntheticCase {
  std::uint64_t seed = 0;
  SceneSpec scene;
  PerturbationSpec perturbation;
  GroundTruth truth;
  PerturbResult detection;
};

SyntheticCase random_case(std::uint64_t seed, int max_dim = 64, int min_dim = 24);

/// A soft prediction whose bud pixels lie in [0.5, 1] and background in
/// [0, 0.5), with sparse speckle.
ProbabilityMap soft_prediction(const BinaryMask& mask, std::uint64_t seed);

inline constexpr int kOracleMaxDim = 128;

/// Reference evaluation through explicit coordinate sets. Deliberately naive;
/// rasters larger than kOracleMaxDim on either side are refused.
ImageEvaluation oracle_metrics(std::span<const Component> components,
                               const GroundTruth& truth, double alpha);

}  // namespace vinemark

#endif  // VINEMARK_SYNTH_HPP
