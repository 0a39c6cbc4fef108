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
#ifndef VINEMARK_RASTER_HPP
#define VINEMARK_RASTER_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vinemark/error.hpp"

namespace vinemark {

// Rasters are row-major so that (row, col) indexing matches image memory
// layout and the PGM/PNG scanline order.
template <typename Scalar>
using Raster =
    Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using ProbabilityMap = Raster<double>;
using BinaryMask = Raster<bool>;
using VoteMap = Raster<int>;

enum class Connectivity { kFour = 4, kEight = 8 };

Connectivity connectivity_from_int(int n);

struct Pixel {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

struct BoundingBox {
  int min_row = 0;
  int min_col = 0;
  int max_row = 0;
  int max_col = 0;

  bool contains(const Eigen::Vector2d& p) const {
    return p.x() >= min_row && p.x() <= max_row && p.y() >= min_col &&
           p.y() <= max_col;
  }
};

/// One connected region of positive pixels. `pixels` is sorted in raster
/// order; `centroid` holds (row, col) in pixel-center coordinates.
struct Component {
  int id = 0;
  std::vector<Pixel> pixels;
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  BoundingBox bbox;

  std::size_t area() const { return pixels.size(); }
};

/// The single annotated bud of an image.
struct GroundTruth {
  BinaryMask mask;
  std::size_t area = 0;
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  double diameter = 0.0;
  // True for single-pixel buds, whose diameter of 0 is replaced by 1 pixel
  // when normalizing distances.
  bool degenerate = false;

  double normalizing_diameter() const { return degenerate ? 1.0 : diameter; }
};

/// Throws kInvalidParameter on empty dimensions or values outside [0, 1]
/// (NaN included).
template <typename Derived>
void validate_probability_map(const Eigen::ArrayBase<Derived>& map) {
  if (map.rows() == 0 || map.cols() == 0) {
    throw Error(ErrorCode::kInvalidParameter, "probability map is empty");
  }
  if (!((map >= 0.0) && (map <= 1.0)).all()) {
    throw Error(ErrorCode::kInvalidParameter,
                "probability map has values outside [0, 1]");
  }
}

/// Positive iff the value is strictly greater than tau.
template <typename Derived>
BinaryMask binarize(const Eigen::ArrayBase<Derived>& map, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw Error(ErrorCode::kInvalidParameter,
                "binarization threshold must lie in [0, 1]");
  }
  return (map.template cast<double>() > tau);
}

std::vector<Component> connected_components(
    const BinaryMask& mask, Connectivity connectivity = Connectivity::kEight);

Eigen::Vector2d centroid(std::span<const Pixel> pixels);

/// Largest Euclidean distance between two positive pixel centers.
double diameter(const BinaryMask& mask);
double diameter(std::span<const Pixel> pixels);

std::vector<Pixel> positive_pixels(const BinaryMask& mask);

/// Builds the truth record for a mask holding exactly one bud. Masks whose
/// positive pixels form more than one 8-connected region are rejected.
GroundTruth make_ground_truth(BinaryMask mask);

namespace detail {
// std::lerp, clamped so rounding can never leave [min(a, b), max(a, b)].
inline double lerp_bounded(double a, double b, double t) {
  return std::clamp(std::lerp(a, b, t), std::min(a, b), std::max(a, b));
}
}  // namespace detail

/// Bilinear resampling with half-pixel-center alignment: output pixel centre
/// (i + 0.5) maps to input coordinate (i + 0.5) * in / out - 0.5, clamped to
/// the valid sample range. Every output value is a convex combination of
/// inputs, so the input range is preserved.
template <typename Derived>
Raster<typename Derived::Scalar> resize_bilinear(
    const Eigen::ArrayBase<Derived>& map, Eigen::Index out_width,
    Eigen::Index out_height) {
  using Scalar = typename Derived::Scalar;
  using detail::lerp_bounded;
  if (out_width < 1 || out_height < 1) {
    throw Error(ErrorCode::kInvalidParameter,
                "resize output dimensions must be positive");
  }
  const Eigen::Index in_height = map.rows();
  const Eigen::Index in_width = map.cols();
  if (in_height == 0 || in_width == 0) {
    throw Error(ErrorCode::kInvalidParameter, "cannot resize an empty raster");
  }

  struct Tap {
    Eigen::Index lo;
    Eigen::Index hi;
    double frac;
  };
  auto taps = [](Eigen::Index in, Eigen::Index out) {
    std::vector<Tap> result(static_cast<std::size_t>(out));
    const double scale = static_cast<double>(in) / static_cast<double>(out);
    for (Eigen::Index i = 0; i < out; ++i) {
      double src = (static_cast<double>(i) + 0.5) * scale - 0.5;
      src = std::clamp(src, 0.0, static_cast<double>(in - 1));
      const auto lo = static_cast<Eigen::Index>(std::floor(src));
      const Eigen::Index hi = std::min(lo + 1, in - 1);
      result[static_cast<std::size_t>(i)] = {lo, hi, src - static_cast<double>(lo)};
    }
    return result;
  };
  const auto row_taps = taps(in_height, out_height);
  const auto col_taps = taps(in_width, out_width);

  Raster<Scalar> out(out_height, out_width);
  for (Eigen::Index r = 0; r < out_height; ++r) {
    const Tap& ty = row_taps[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < out_width; ++c) {
      const Tap& tx = col_taps[static_cast<std::size_t>(c)];
      const double top = lerp_bounded(static_cast<double>(map(ty.lo, tx.lo)),
                                      static_cast<double>(map(ty.lo, tx.hi)),
                                      tx.frac);
      const double bottom =
          lerp_bounded(static_cast<double>(map(ty.hi, tx.lo)),
                       static_cast<double>(map(ty.hi, tx.hi)), tx.frac);
      out(r, c) = static_cast<Scalar>(lerp_bounded(top, bottom, ty.frac));
    }
  }
  return out;
}

}  // namespace vinemark

#endif  // VINEMARK_RASTER_HPP
