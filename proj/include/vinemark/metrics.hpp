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
#ifndef VINEMARK_METRICS_HPP
#define VINEMARK_METRICS_HPP

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vinemark/raster.hpp"

namespace vinemark {

struct MatchConfig {
  // IoU threshold separating true positives from splits.
  double alpha = 0.5;

  void validate() const;
};

enum class VerdictKind { kTruePositive, kSplit, kFalseAlarm };

std::string_view to_string(VerdictKind kind);

/// Raw pixel counts behind every per-component ratio.
struct Overlap {
  std::size_t intersection = 0;
  std::size_t component_area = 0;
  std::size_t truth_area = 0;

  std::size_t union_area() const {
    return component_area + truth_area - intersection;
  }
};

struct SegmentationScores {
  double precision = 0.0;
  double recall = 0.0;
  double iou = 0.0;
};

Overlap overlap(const Component& component, const GroundTruth& truth);

double iou(const Component& component, const GroundTruth& truth);

SegmentationScores seg_precision_recall(const Component& component,
                                        const GroundTruth& truth);

/// Component area over bud area.
double normalized_area(const Component& component, const GroundTruth& truth);

/// Centroid distance over bud diameter (1 pixel for single-pixel buds).
double normalized_distance(const Component& component, const GroundTruth& truth);

/// kind follows from IoU alone: TruePositive iff iou >= alpha, Split iff the
/// component overlaps the bud otherwise, FalseAlarm iff it does not.
VerdictKind classify_overlap(double iou, std::size_t intersection, double alpha);

struct ComponentVerdict {
  int component_id = 0;
  VerdictKind kind = VerdictKind::kFalseAlarm;
  std::size_t area = 0;
  std::size_t intersection = 0;
  double iou = 0.0;
  double seg_precision = 0.0;
  double seg_recall = 0.0;
  double normalized_area = 0.0;
  double normalized_distance = 0.0;
};

struct ImageEvaluation {
  std::string image_id;
  double alpha = 0.5;
  std::vector<ComponentVerdict> verdicts;
  // The bud has no true-positive component.
  bool false_negative = true;
  bool truth_degenerate = false;

  std::size_t count(VerdictKind kind) const;
};

ImageEvaluation classify_components(std::span<const Component> components,
                                    const GroundTruth& truth,
                                    const MatchConfig& config,
                                    std::string image_id = {});

struct DetectionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t splits = 0;
  std::size_t false_alarms = 0;
  double p_d = 0.0;
  double r_d = 0.0;
  double f1 = 0.0;

  /// Fills fp and the three ratios; zero denominators give 0.
  static DetectionCounts from_counts(std::size_t tp, std::size_t splits,
                                     std::size_t false_alarms, std::size_t fn);
};

/// Sums over images. All evaluations must share one alpha.
DetectionCounts detection_counts(std::span<const ImageEvaluation> evals);

}  // namespace vinemark

#endif  // VINEMARK_METRICS_HPP
