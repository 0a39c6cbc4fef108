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
#ifndef VINEMARK_SWDETECT_HPP
#define VINEMARK_SWDETECT_HPP

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <tuple>
#include <vector>

#include "vinemark/raster.hpp"

namespace vinemark {

/// A square window; (row, col) is its top-left corner.
struct Patch {
  int row = 0;
  int col = 0;
  int size = 0;

  friend auto operator<=>(const Patch&, const Patch&) = default;
};

/// Square windows tiled at half-window displacement. Each axis takes origins
/// at multiples of the stride while the window fits, plus one window flush
/// with the far border when the tiling stops short of it. Pixels at least
/// one window size away from every border lie in exactly four patches when
/// the window size is even; border pixels may lie in fewer or more.
struct PatchGrid {
  int width = 0;
  int height = 0;
  int window_size = 0;
  int stride = 0;
  std::vector<Patch> patches;  // row-major over origins
};

PatchGrid build_grid(int width, int height, int window_size);

/// Per-axis window origins used by build_grid.
std::vector<int> axis_origins(int extent, int window_size);

/// Decides whether a patch shows a bud. Implementations must be
/// deterministic for a fixed instance and patch.
class PatchClassifier {
 public:
  virtual ~PatchClassifier() = default;
  virtual bool classify(const Patch& patch, const ProbabilityMap& image) const = 0;
};

class ConstantClassifier final : public PatchClassifier {
 public:
  explicit ConstantClassifier(bool label) : label_(label) {}
  bool classify(const Patch&, const ProbabilityMap&) const override { return label_; }

 private:
  bool label_;
};

/// Labels a patch from the truth mask: positive iff the bud-pixel fraction
/// of the window reaches `min_fraction`. A fraction of 0 means "at least one
/// bud pixel".
class TruthOracleClassifier final : public PatchClassifier {
 public:
  static constexpr double kDefaultMinFraction = 0.2;

  explicit TruthOracleClassifier(const BinaryMask& truth,
                                 double min_fraction = kDefaultMinFraction);
  bool classify(const Patch& patch, const ProbabilityMap& image) const override;

  std::size_t bud_pixels(const Patch& patch) const;

 private:
  // Summed-area table with a zero guard row and column.
  Raster<long long> integral_;
  double min_fraction_;
};

/// Precomputed labels keyed by (row, col, size), read from a CSV with header
/// `row,col,size,label`. Patches absent from the table are negative and are
/// counted in missing_count().
class CsvPatchClassifier final : public PatchClassifier {
 public:
  static CsvPatchClassifier from_file(const std::filesystem::path& path);
  static CsvPatchClassifier from_stream(std::istream& in, const std::string& name);

  CsvPatchClassifier(const CsvPatchClassifier& other);
  CsvPatchClassifier(CsvPatchClassifier&&) noexcept;

  bool classify(const Patch& patch, const ProbabilityMap& image) const override;

  std::size_t label_count() const { return labels_.size(); }
  std::size_t missing_count() const { return missing_.load(); }

 private:
  CsvPatchClassifier() = default;

  std::map<std::tuple<int, int, int>, bool> labels_;
  mutable std::atomic<std::size_t> missing_{0};
};

/// Each pixel receives one vote per positive patch containing it.
VoteMap vote(const PatchGrid& grid, const PatchClassifier& classifier,
             const ProbabilityMap& image);

/// Number of grid patches covering each pixel.
VoteMap coverage(const PatchGrid& grid);

/// Positive iff votes >= nu, nu in 1..4.
BinaryMask threshold_votes(const VoteMap& votes, int nu);

}  // namespace vinemark

#endif  // VINEMARK_SWDETECT_HPP
