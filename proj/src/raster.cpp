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
#include "vinemark/raster.hpp"

#include <cstdint>
#include <deque>
#include <tuple>

namespace vinemark {

namespace {

constexpr int kFourNeighbors[4][2] = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};
constexpr int kEightNeighbors[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                       {0, 1},   {1, -1}, {1, 0},  {1, 1}};

std::int64_t cross(const Pixel& o, const Pixel& a, const Pixel& b) {
  return static_cast<std::int64_t>(a.row - o.row) * (b.col - o.col) -
         static_cast<std::int64_t>(a.col - o.col) * (b.row - o.row);
}

std::int64_t squared_distance(const Pixel& a, const Pixel& b) {
  const std::int64_t dr = a.row - b.row;
  const std::int64_t dc = a.col - b.col;
  return dr * dr + dc * dc;
}

// Andrew's monotone chain; input must be sorted and unique.
std::vector<Pixel> convex_hull(const std::vector<Pixel>& points) {
  if (points.size() < 3) return points;
  std::vector<Pixel> hull(2 * points.size());
  std::size_t k = 0;
  for (const Pixel& p : points) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    const Pixel& p = points[i];
    while (k >= lower && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return hull;
}

// Pixels with at least one 4-neighbour outside the set. The farthest pair of
// any pixel set lies on its convex hull, whose vertices are boundary pixels.
std::vector<Pixel> boundary_pixels(const BinaryMask& mask) {
  std::vector<Pixel> result;
  const auto rows = static_cast<int>(mask.rows());
  const auto cols = static_cast<int>(mask.cols());
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!mask(r, c)) continue;
      bool interior = true;
      for (const auto& d : kFourNeighbors) {
        const int nr = r + d[0];
        const int nc = c + d[1];
        if (nr < 0 || nc < 0 || nr >= rows || nc >= cols || !mask(nr, nc)) {
          interior = false;
          break;
        }
      }
      if (!interior) result.push_back({r, c});
    }
  }
  return result;
}

double diameter_of_sorted(std::vector<Pixel> points) {
  if (points.empty()) {
    throw Error(ErrorCode::kEmptyTruth, "diameter of an empty pixel set");
  }
  const std::vector<Pixel> hull = convex_hull(points);
  std::int64_t best = 0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    for (std::size_t j = i + 1; j < hull.size(); ++j) {
      best = std::max(best, squared_distance(hull[i], hull[j]));
    }
  }
  return std::sqrt(static_cast<double>(best));
}

}  // namespace

Connectivity connectivity_from_int(int n) {
  if (n == 4) return Connectivity::kFour;
  if (n == 8) return Connectivity::kEight;
  throw Error(ErrorCode::kInvalidParameter, "connectivity must be 4 or 8");
}

std::vector<Component> connected_components(const BinaryMask& mask,
                                            Connectivity connectivity) {
  const auto rows = static_cast<int>(mask.rows());
  const auto cols = static_cast<int>(mask.cols());
  const std::span<const int[2]> offsets =
      connectivity == Connectivity::kFour ? std::span<const int[2]>(kFourNeighbors)
                                          : std::span<const int[2]>(kEightNeighbors);

  Raster<std::uint8_t> visited = Raster<std::uint8_t>::Zero(rows, cols);
  std::vector<Component> components;
  std::deque<Pixel> frontier;

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!mask(r, c) || visited(r, c)) continue;
      Component comp;
      comp.bbox = {r, c, r, c};
      visited(r, c) = 1;
      frontier.push_back({r, c});
      while (!frontier.empty()) {
        const Pixel p = frontier.front();
        frontier.pop_front();
        comp.pixels.push_back(p);
        comp.bbox.min_row = std::min(comp.bbox.min_row, p.row);
        comp.bbox.min_col = std::min(comp.bbox.min_col, p.col);
        comp.bbox.max_row = std::max(comp.bbox.max_row, p.row);
        comp.bbox.max_col = std::max(comp.bbox.max_col, p.col);
        for (const auto& d : offsets) {
          const int nr = p.row + d[0];
          const int nc = p.col + d[1];
          if (nr < 0 || nc < 0 || nr >= rows || nc >= cols) continue;
          if (!mask(nr, nc) || visited(nr, nc)) continue;
          visited(nr, nc) = 1;
          frontier.push_back({nr, nc});
        }
      }
      std::sort(comp.pixels.begin(), comp.pixels.end());
      comp.centroid = centroid(comp.pixels);
      components.push_back(std::move(comp));
    }
  }

  // The first pixel breaks ties between equal bbox corners.
  std::stable_sort(components.begin(), components.end(),
                   [](const Component& a, const Component& b) {
                     return std::tie(a.bbox.min_row, a.bbox.min_col,
                                     a.pixels.front()) <
                            std::tie(b.bbox.min_row, b.bbox.min_col,
                                     b.pixels.front());
                   });
  for (std::size_t i = 0; i < components.size(); ++i) {
    components[i].id = static_cast<int>(i);
  }
  return components;
}

Eigen::Vector2d centroid(std::span<const Pixel> pixels) {
  if (pixels.empty()) {
    throw Error(ErrorCode::kEmptyComponent, "centroid of an empty pixel set");
  }
  // Integer sums are exact for any realistic image size.
  std::int64_t row_sum = 0;
  std::int64_t col_sum = 0;
  for (const Pixel& p : pixels) {
    row_sum += p.row;
    col_sum += p.col;
  }
  const auto n = static_cast<double>(pixels.size());
  return {static_cast<double>(row_sum) / n, static_cast<double>(col_sum) / n};
}

double diameter(const BinaryMask& mask) {
  std::vector<Pixel> boundary = boundary_pixels(mask);
  // boundary_pixels scans in raster order, so the list is already sorted.
  return diameter_of_sorted(std::move(boundary));
}

double diameter(std::span<const Pixel> pixels) {
  std::vector<Pixel> points(pixels.begin(), pixels.end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return diameter_of_sorted(std::move(points));
}

std::vector<Pixel> positive_pixels(const BinaryMask& mask) {
  std::vector<Pixel> result;
  result.reserve(static_cast<std::size_t>(mask.count()));
  for (int r = 0; r < mask.rows(); ++r) {
    for (int c = 0; c < mask.cols(); ++c) {
      if (mask(r, c)) result.push_back({r, c});
    }
  }
  return result;
}

GroundTruth make_ground_truth(BinaryMask mask) {
  const std::vector<Pixel> pixels = positive_pixels(mask);
  if (pixels.empty()) {
    throw Error(ErrorCode::kEmptyTruth, "truth mask has no bud pixels");
  }
  if (connected_components(mask, Connectivity::kEight).size() > 1) {
    throw Error(ErrorCode::kMultiBudTruth,
                "truth mask holds more than one bud region");
  }
  GroundTruth truth;
  truth.area = pixels.size();
  truth.centroid = centroid(pixels);
  truth.diameter = diameter(mask);
  truth.degenerate = truth.diameter == 0.0;
  truth.mask = std::move(mask);
  return truth;
}

}  // namespace vinemark
