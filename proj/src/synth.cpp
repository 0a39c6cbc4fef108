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
#include "vinemark/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <utility>

namespace vinemark {

namespace {

// std::uniform_*_distribution output is implementation-defined; these
// helpers keep fixtures identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix(seed)) {}

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  int integer(int lo, int hi) {  // inclusive
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(engine_() % span);
  }

  bool chance(double p) { return uniform(0.0, 1.0) < p; }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
};

[[noreturn]] void out_of_bounds(const char* what) {
  throw Error(ErrorCode::kInvalidParameter, std::string(what) + " leaves the image");
}

double outer_radius(const BudSpec& bud) {
  switch (bud.shape) {
    case BudShape::kDisk: return bud.radius;
    case BudShape::kEllipse: return bud.radius * std::max(1.0, bud.aspect);
    case BudShape::kRectangle: return 0.0;  // handled per axis
  }
  return bud.radius;
}

BinaryMask grow(const BinaryMask& mask, bool dilate) {
  BinaryMask out = mask;
  const Eigen::Index rows = mask.rows();
  const Eigen::Index cols = mask.cols();
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const bool up = r > 0 && mask(r - 1, c);
      const bool down = r + 1 < rows && mask(r + 1, c);
      const bool left = c > 0 && mask(r, c - 1);
      const bool right = c + 1 < cols && mask(r, c + 1);
      // Pixels outside the raster count as background.
      out(r, c) = dilate ? (mask(r, c) || up || down || left || right)
                         : (mask(r, c) && up && down && left && right);
    }
  }
  return out;
}

bool touches_border(const BinaryMask& mask) {
  return mask.row(0).any() || mask.row(mask.rows() - 1).any() ||
         mask.col(0).any() || mask.col(mask.cols() - 1).any();
}

BoundingBox bbox_of(const BinaryMask& mask) {
  BoundingBox box{static_cast<int>(mask.rows()), static_cast<int>(mask.cols()), -1, -1};
  for (int r = 0; r < mask.rows(); ++r) {
    for (int c = 0; c < mask.cols(); ++c) {
      if (!mask(r, c)) continue;
      box.min_row = std::min(box.min_row, r);
      box.min_col = std::min(box.min_col, c);
      box.max_row = std::max(box.max_row, r);
      box.max_col = std::max(box.max_col, c);
    }
  }
  return box;
}

}  // namespace

BudSpec BudSpec::disk(double row, double col, double radius) {
  BudSpec bud;
  bud.center = {row, col};
  bud.radius = radius;
  bud.shape = BudShape::kDisk;
  return bud;
}

BudSpec BudSpec::rectangle(int top, int left, int height, int width) {
  BudSpec bud;
  bud.shape = BudShape::kRectangle;
  bud.center = {top + (height - 1) / 2.0, left + (width - 1) / 2.0};
  bud.radius = width / 2.0;
  bud.aspect = static_cast<double>(height) / static_cast<double>(width);
  return bud;
}

BinaryMask rasterize_bud(const SceneSpec& spec) {
  if (spec.width < 1 || spec.height < 1) {
    throw Error(ErrorCode::kInvalidParameter, "scene dimensions must be positive");
  }
  const BudSpec& bud = spec.bud;
  // Rectangles only need a one-pixel side, i.e. a half-width of 0.5.
  const double min_radius = bud.shape == BudShape::kRectangle ? 0.5 : 1.0;
  if (!(bud.radius >= min_radius) || !(bud.aspect > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "bud radius is too small");
  }
  double half_rows = outer_radius(bud);
  double half_cols = half_rows;
  if (bud.shape == BudShape::kRectangle) {
    half_cols = bud.radius;
    half_rows = bud.radius * bud.aspect;
  }
  const double cr = bud.center.x();
  const double cc = bud.center.y();
  if (cr - half_rows < -0.5 || cc - half_cols < -0.5 || cr + half_rows > spec.height - 0.5 ||
      cc + half_cols > spec.width - 0.5) {
    out_of_bounds("bud");
  }

  BinaryMask mask = BinaryMask::Constant(spec.height, spec.width, false);
  const double ca = std::cos(bud.angle);
  const double sa = std::sin(bud.angle);
  const double minor = bud.radius * bud.aspect;
  for (int r = 0; r < spec.height; ++r) {
    for (int c = 0; c < spec.width; ++c) {
      const double dr = r - cr;
      const double dc = c - cc;
      bool inside = false;
      switch (bud.shape) {
        case BudShape::kDisk:
          inside = dr * dr + dc * dc <= bud.radius * bud.radius;
          break;
        case BudShape::kEllipse: {
          const double u = (dc * ca + dr * sa) / bud.radius;
          const double v = (-dc * sa + dr * ca) / minor;
          inside = u * u + v * v <= 1.0;
          break;
        }
        case BudShape::kRectangle:
          inside = std::abs(dc) < half_cols && std::abs(dr) < half_rows;
          break;
      }
      mask(r, c) = inside;
    }
  }
  if (!mask.any()) {
    throw Error(ErrorCode::kInvalidParameter, "bud rasterizes to no pixels");
  }
  return mask;
}

GroundTruth make_truth(const SceneSpec& spec) { return make_ground_truth(rasterize_bud(spec)); }

PerturbResult perturb(const GroundTruth& truth, const PerturbationSpec& spec, double alpha) {
  if (spec.split_into < 1) {
    throw Error(ErrorCode::kInvalidParameter, "split_into must be at least 1");
  }
  for (const FalseAlarmSpec& fa : spec.false_alarms) {
    if (!(fa.area_fraction > 0.0) || !(fa.offset_diameters >= 0.0)) {
      throw Error(ErrorCode::kInvalidParameter, "invalid false-alarm spec");
    }
  }
  const auto rows = static_cast<int>(truth.mask.rows());
  const auto cols = static_cast<int>(truth.mask.cols());

  BinaryMask body = truth.mask;
  for (int i = 0; i < std::abs(spec.dilate_or_erode); ++i) {
    if (spec.dilate_or_erode > 0 && touches_border(body)) out_of_bounds("dilated bud");
    body = grow(body, spec.dilate_or_erode > 0);
  }
  if (!body.any()) {
    throw Error(ErrorCode::kInvalidParameter, "erosion removes the whole bud");
  }

  if (spec.shift_rows != 0 || spec.shift_cols != 0) {
    BinaryMask shifted = BinaryMask::Constant(rows, cols, false);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        if (!body(r, c)) continue;
        const int nr = r + spec.shift_rows;
        const int nc = c + spec.shift_cols;
        if (nr < 0 || nc < 0 || nr >= rows || nc >= cols) out_of_bounds("shifted bud");
        shifted(nr, nc) = true;
      }
    }
    body = std::move(shifted);
  }

  const BoundingBox body_box = bbox_of(body);
  if (spec.split_into > 1) {
    // Blank n-1 separating columns; a one-column gap disconnects strips even
    // under 8-connectivity.
    const int width = body_box.max_col - body_box.min_col + 1;
    if (width < 2 * spec.split_into - 1) {
      throw Error(ErrorCode::kInvalidParameter, "bud too narrow to split");
    }
    for (int k = 1; k < spec.split_into; ++k) {
      const int gap = body_box.min_col + (k * width) / spec.split_into;
      body.col(gap).setConstant(false);
    }
  }

  PerturbResult result;
  const BoundingBox tb = bbox_of(truth.mask);
  const bool rectangular_bud =
      truth.area == static_cast<std::size_t>(tb.max_row - tb.min_row + 1) *
                        static_cast<std::size_t>(tb.max_col - tb.min_col + 1);
  if (rectangular_bud && spec.dilate_or_erode == 0 && spec.split_into == 1) {
    const long long h = tb.max_row - tb.min_row + 1;
    const long long w = tb.max_col - tb.min_col + 1;
    const long long inter = std::max(0LL, h - std::abs(spec.shift_rows)) *
                            std::max(0LL, w - std::abs(spec.shift_cols));
    const long long uni = 2 * h * w - inter;
    ExpectedComponent e;
    e.bbox = body_box;
    e.iou = static_cast<double>(inter) / static_cast<double>(uni);
    e.kind = classify_overlap(*e.iou, static_cast<std::size_t>(inter), alpha);
    e.normalized_area = 1.0;
    result.expected.push_back(e);
  }

  BinaryMask mask = body;
  const double diameter = truth.normalizing_diameter();
  for (const FalseAlarmSpec& fa : spec.false_alarms) {
    const int side = std::max(
        1, static_cast<int>(std::lround(std::sqrt(fa.area_fraction * truth.area))));
    bool placed = false;
    for (int dir = 0; dir < 8 && !placed; ++dir) {
      const double theta = dir * std::numbers::pi / 4.0;
      const double center_r = truth.centroid.x() + fa.offset_diameters * diameter * std::sin(theta);
      const double center_c = truth.centroid.y() + fa.offset_diameters * diameter * std::cos(theta);
      const int top = static_cast<int>(std::lround(center_r - (side - 1) / 2.0));
      const int left = static_cast<int>(std::lround(center_c - (side - 1) / 2.0));
      if (top < 0 || left < 0 || top + side > rows || left + side > cols) continue;
      // Keep a one-pixel moat so the square stays its own component, and
      // stay clear of the bud so it is a false alarm.
      const int r0 = std::max(0, top - 1);
      const int c0 = std::max(0, left - 1);
      const int r1 = std::min(rows, top + side + 1);
      const int c1 = std::min(cols, left + side + 1);
      if (mask.block(r0, c0, r1 - r0, c1 - c0).any()) continue;
      if (truth.mask.block(top, left, side, side).any()) continue;
      mask.block(top, left, side, side).setConstant(true);

      ExpectedComponent e;
      e.bbox = {top, left, top + side - 1, left + side - 1};
      e.kind = VerdictKind::kFalseAlarm;
      e.iou = 0.0;
      e.normalized_area = static_cast<double>(side * side) / static_cast<double>(truth.area);
      const Eigen::Vector2d square_center{top + (side - 1) / 2.0, left + (side - 1) / 2.0};
      e.normalized_distance = (square_center - truth.centroid).norm() / diameter;
      result.expected.push_back(e);
      placed = true;
    }
    if (!placed) out_of_bounds("false alarm");
  }
  result.mask = std::move(mask);
  return result;
}

SyntheticCase random_case(std::uint64_t seed, int max_dim, int min_dim) {
  if (min_dim < 24 || max_dim < min_dim) {
    throw Error(ErrorCode::kInvalidParameter,
                "synthetic scenes need 24 <= min_dim <= max_dim");
  }
  Rng rng(seed);
  // Rejection loop: draws continue from the same stream, so the result is a
  // pure function of the seed.
  for (int attempt = 0; attempt < 1000; ++attempt) {
    SyntheticCase out;
    out.seed = seed;
    out.scene.rng_seed = seed;
    out.scene.width = rng.integer(min_dim, max_dim);
    out.scene.height = rng.integer(min_dim, max_dim);
    const int short_side = std::min(out.scene.width, out.scene.height);
    const int shape = rng.integer(0, 2);
    if (shape == 2) {
      const int h = rng.integer(2, short_side / 3);
      const int w = rng.integer(2, short_side / 3);
      out.scene.bud = BudSpec::rectangle(rng.integer(0, out.scene.height - h),
                                         rng.integer(0, out.scene.width - w), h, w);
    } else {
      BudSpec bud;
      bud.shape = shape == 0 ? BudShape::kDisk : BudShape::kEllipse;
      bud.radius = rng.uniform(1.5, short_side / 6.0);
      if (bud.shape == BudShape::kEllipse) {
        bud.aspect = rng.uniform(0.5, 1.0);
        bud.angle = rng.uniform(0.0, std::numbers::pi);
      }
      const double margin = bud.radius + 0.5;
      bud.center = {rng.uniform(margin, out.scene.height - 1 - margin),
                    rng.uniform(margin, out.scene.width - 1 - margin)};
      out.scene.bud = bud;
    }

    PerturbationSpec& p = out.perturbation;
    const int reach = std::max(1, static_cast<int>(out.scene.bud.radius));
    p.shift_rows = rng.integer(-reach, reach);
    p.shift_cols = rng.integer(-reach, reach);
    p.dilate_or_erode = rng.chance(0.3) ? rng.integer(-1, 1) : 0;
    p.split_into = rng.chance(0.25) ? rng.integer(2, 3) : 1;
    const int fa_count = rng.integer(0, 2);
    for (int i = 0; i < fa_count; ++i) {
      p.false_alarms.push_back({rng.uniform(1.0, 2.5), rng.uniform(0.02, 0.3)});
    }

    try {
      out.truth = make_truth(out.scene);
      out.detection = perturb(out.truth, p);
      return out;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInvalidParameter) throw;
    }
  }
  throw Error(ErrorCode::kInvalidParameter, "could not generate a synthetic case");
}

ProbabilityMap soft_prediction(const BinaryMask& mask, std::uint64_t seed) {
  Rng rng(seed ^ 0x5eedULL);
  ProbabilityMap map(mask.rows(), mask.cols());
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    double v = 0.0;
    if (mask.data()[i]) {
      v = rng.uniform(0.5, 1.0);
    } else if (rng.chance(0.01)) {
      v = rng.uniform(0.0, 0.5);
    }
    map.data()[i] = v;
  }
  return map;
}

ImageEvaluation oracle_metrics(std::span<const Component> components,
                               const GroundTruth& truth, double alpha) {
  const BinaryMask& tm = truth.mask;
  if (tm.rows() > kOracleMaxDim || tm.cols() > kOracleMaxDim) {
    throw Error(ErrorCode::kOracleSize, "oracle input exceeds 128x128");
  }
  using Coord = std::pair<int, int>;
  std::set<Coord> bud;
  for (int r = 0; r < tm.rows(); ++r) {
    for (int c = 0; c < tm.cols(); ++c) {
      if (tm(r, c)) bud.insert({r, c});
    }
  }
  if (bud.empty()) throw Error(ErrorCode::kEmptyTruth, "truth mask has no bud pixels");

  auto mean_of = [](const std::set<Coord>& s) {
    long double sr = 0, sc = 0;
    for (const auto& [r, c] : s) {
      sr += r;
      sc += c;
    }
    return std::pair<double, double>{static_cast<double>(sr / s.size()),
                                     static_cast<double>(sc / s.size())};
  };
  const auto [bud_r, bud_c] = mean_of(bud);
  long long best = 0;
  for (auto a = bud.begin(); a != bud.end(); ++a) {
    for (auto b = std::next(a); b != bud.end(); ++b) {
      const long long dr = a->first - b->first;
      const long long dc = a->second - b->second;
      best = std::max(best, dr * dr + dc * dc);
    }
  }
  const bool degenerate = best == 0;
  const double diameter = degenerate ? 1.0 : std::sqrt(static_cast<double>(best));

  ImageEvaluation eval;
  eval.alpha = alpha;
  eval.truth_degenerate = degenerate;
  for (const Component& component : components) {
    if (component.pixels.empty()) {
      throw Error(ErrorCode::kEmptyComponent, "component has no pixels");
    }
    const std::set<Coord> pix = [&] {
      std::set<Coord> s;
      for (const Pixel& p : component.pixels) s.insert({p.row, p.col});
      return s;
    }();
    std::vector<Coord> inter;
    std::vector<Coord> uni;
    std::set_intersection(pix.begin(), pix.end(), bud.begin(), bud.end(),
                          std::back_inserter(inter));
    std::set_union(pix.begin(), pix.end(), bud.begin(), bud.end(), std::back_inserter(uni));

    ComponentVerdict v;
    v.component_id = component.id;
    v.area = pix.size();
    v.intersection = inter.size();
    v.iou = static_cast<double>(inter.size()) / static_cast<double>(uni.size());
    v.seg_precision = static_cast<double>(inter.size()) / static_cast<double>(pix.size());
    v.seg_recall = static_cast<double>(inter.size()) / static_cast<double>(bud.size());
    v.normalized_area = static_cast<double>(pix.size()) / static_cast<double>(bud.size());
    const auto [cr, cc] = mean_of(pix);
    v.normalized_distance = std::hypot(cr - bud_r, cc - bud_c) / diameter;
    if (v.iou >= alpha) {
      v.kind = VerdictKind::kTruePositive;
    } else if (!inter.empty()) {
      v.kind = VerdictKind::kSplit;
    } else {
      v.kind = VerdictKind::kFalseAlarm;
    }
    eval.verdicts.push_back(v);
  }
  eval.false_negative =
      std::none_of(eval.verdicts.begin(), eval.verdicts.end(),
                   [](const ComponentVerdict& v) { return v.kind == VerdictKind::kTruePositive; });
  return eval;
}

}  // namespace vinemark
