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
#include "vinemark/metrics.hpp"

#include <algorithm>

namespace vinemark {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void require_truth(const GroundTruth& truth) {
  if (truth.area == 0) {
    throw Error(ErrorCode::kEmptyTruth, "truth mask has no bud pixels");
  }
}

}  // namespace

void MatchConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidParameter, "alpha must lie in (0, 1]");
  }
}

std::string_view to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::kTruePositive: return "TruePositive";
    case VerdictKind::kSplit: return "Split";
    case VerdictKind::kFalseAlarm: return "FalseAlarm";
  }
  return "unknown";
}

Overlap overlap(const Component& component, const GroundTruth& truth) {
  require_truth(truth);
  Overlap result;
  result.component_area = component.area();
  result.truth_area = truth.area;
  const BinaryMask& mask = truth.mask;
  for (const Pixel& p : component.pixels) {
    if (p.row < 0 || p.col < 0 || p.row >= mask.rows() || p.col >= mask.cols()) {
      throw Error(ErrorCode::kInconsistentInput,
                  "component pixel lies outside the truth raster");
    }
    if (mask(p.row, p.col)) ++result.intersection;
  }
  return result;
}

double iou(const Component& component, const GroundTruth& truth) {
  const Overlap o = overlap(component, truth);
  return ratio(o.intersection, o.union_area());
}

SegmentationScores seg_precision_recall(const Component& component,
                                        const GroundTruth& truth) {
  if (component.pixels.empty()) {
    throw Error(ErrorCode::kEmptyComponent, "component has no pixels");
  }
  const Overlap o = overlap(component, truth);
  return {ratio(o.intersection, o.component_area), ratio(o.intersection, o.truth_area),
          ratio(o.intersection, o.union_area())};
}

double normalized_area(const Component& component, const GroundTruth& truth) {
  require_truth(truth);
  return ratio(component.area(), truth.area);
}

double normalized_distance(const Component& component, const GroundTruth& truth) {
  require_truth(truth);
  return (component.centroid - truth.centroid).norm() / truth.normalizing_diameter();
}

VerdictKind classify_overlap(double iou, std::size_t intersection, double alpha) {
  if (iou >= alpha) return VerdictKind::kTruePositive;
  return intersection > 0 ? VerdictKind::kSplit : VerdictKind::kFalseAlarm;
}

std::size_t ImageEvaluation::count(VerdictKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(verdicts.begin(), verdicts.end(),
                    [kind](const ComponentVerdict& v) { return v.kind == kind; }));
}

ImageEvaluation classify_components(std::span<const Component> components,
                                    const GroundTruth& truth,
                                    const MatchConfig& config,
                                    std::string image_id) {
  config.validate();
  require_truth(truth);
  ImageEvaluation eval;
  eval.image_id = std::move(image_id);
  eval.alpha = config.alpha;
  eval.truth_degenerate = truth.degenerate;
  eval.verdicts.reserve(components.size());
  for (const Component& component : components) {
    if (component.pixels.empty()) {
      throw Error(ErrorCode::kEmptyComponent, "component has no pixels");
    }
    const Overlap o = overlap(component, truth);
    ComponentVerdict v;
    v.component_id = component.id;
    v.area = o.component_area;
    v.intersection = o.intersection;
    v.iou = ratio(o.intersection, o.union_area());
    v.seg_precision = ratio(o.intersection, o.component_area);
    v.seg_recall = ratio(o.intersection, o.truth_area);
    v.normalized_area = normalized_area(component, truth);
    v.normalized_distance = normalized_distance(component, truth);
    v.kind = classify_overlap(v.iou, v.intersection, config.alpha);
    eval.verdicts.push_back(v);
  }
  eval.false_negative = eval.count(VerdictKind::kTruePositive) == 0;
  return eval;
}

DetectionCounts DetectionCounts::from_counts(std::size_t tp, std::size_t splits,
                                             std::size_t false_alarms,
                                             std::size_t fn) {
  DetectionCounts c;
  c.tp = tp;
  c.splits = splits;
  c.false_alarms = false_alarms;
  c.fp = splits + false_alarms;
  c.fn = fn;
  c.p_d = ratio(c.tp, c.tp + c.fp);
  c.r_d = ratio(c.tp, c.tp + c.fn);
  c.f1 = c.p_d + c.r_d > 0.0 ? 2.0 * c.p_d * c.r_d / (c.p_d + c.r_d) : 0.0;
  return c;
}

DetectionCounts detection_counts(std::span<const ImageEvaluation> evals) {
  std::size_t tp = 0;
  std::size_t splits = 0;
  std::size_t false_alarms = 0;
  std::size_t fn = 0;
  for (const ImageEvaluation& eval : evals) {
    if (eval.alpha != evals.front().alpha) {
      throw Error(ErrorCode::kInconsistentConfig,
                  "evaluations were produced with different alpha values");
    }
    tp += eval.count(VerdictKind::kTruePositive);
    splits += eval.count(VerdictKind::kSplit);
    false_alarms += eval.count(VerdictKind::kFalseAlarm);
    if (eval.false_negative) ++fn;
  }
  return DetectionCounts::from_counts(tp, splits, false_alarms, fn);
}

}  // namespace vinemark
