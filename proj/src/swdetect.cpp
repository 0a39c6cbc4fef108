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
#include "vinemark/swdetect.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace vinemark {

std::vector<int> axis_origins(int extent, int window_size) {
  // Odd sizes round the displacement down; size 1 still needs to advance.
  const int stride = std::max(1, window_size / 2);
  std::vector<int> origins;
  for (int origin = 0; origin + window_size <= extent; origin += stride) {
    origins.push_back(origin);
  }
  if (origins.back() + window_size < extent) origins.push_back(extent - window_size);
  return origins;
}

PatchGrid build_grid(int width, int height, int window_size) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidParameter, "image dimensions must be positive");
  }
  if (window_size < 1) {
    throw Error(ErrorCode::kInvalidParameter, "window size must be positive");
  }
  if (window_size > std::min(width, height)) {
    throw Error(ErrorCode::kWindowTooLarge,
                "window size " + std::to_string(window_size) +
                    " exceeds image dimension " +
                    std::to_string(std::min(width, height)));
  }
  PatchGrid grid;
  grid.width = width;
  grid.height = height;
  grid.window_size = window_size;
  grid.stride = std::max(1, window_size / 2);
  const std::vector<int> rows = axis_origins(height, window_size);
  const std::vector<int> cols = axis_origins(width, window_size);
  grid.patches.reserve(rows.size() * cols.size());
  for (int r : rows) {
    for (int c : cols) grid.patches.push_back({r, c, window_size});
  }
  return grid;
}

TruthOracleClassifier::TruthOracleClassifier(const BinaryMask& truth,
                                             double min_fraction)
    : integral_(Raster<long long>::Zero(truth.rows() + 1, truth.cols() + 1)),
      min_fraction_(min_fraction) {
  if (!(min_fraction >= 0.0 && min_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidParameter, "bud fraction must lie in [0, 1]");
  }
  for (Eigen::Index r = 0; r < truth.rows(); ++r) {
    for (Eigen::Index c = 0; c < truth.cols(); ++c) {
      integral_(r + 1, c + 1) = (truth(r, c) ? 1 : 0) + integral_(r, c + 1) +
                                integral_(r + 1, c) - integral_(r, c);
    }
  }
}

std::size_t TruthOracleClassifier::bud_pixels(const Patch& patch) const {
  const Eigen::Index r0 = patch.row;
  const Eigen::Index c0 = patch.col;
  const Eigen::Index r1 = patch.row + patch.size;
  const Eigen::Index c1 = patch.col + patch.size;
  // The table is offset by one, so r1 and c1 may equal the mask extent.
  if (r0 < 0 || c0 < 0 || r1 > integral_.rows() - 1 || c1 > integral_.cols() - 1) {
    throw Error(ErrorCode::kInconsistentInput, "patch lies outside the truth mask");
  }
  return static_cast<std::size_t>(integral_(r1, c1) - integral_(r0, c1) -
                                  integral_(r1, c0) + integral_(r0, c0));
}

bool TruthOracleClassifier::classify(const Patch& patch, const ProbabilityMap&) const {
  const std::size_t count = bud_pixels(patch);
  if (min_fraction_ == 0.0) return count > 0;
  const double area = static_cast<double>(patch.size) * patch.size;
  return static_cast<double>(count) >= min_fraction_ * area;
}

CsvPatchClassifier::CsvPatchClassifier(const CsvPatchClassifier& other)
    : labels_(other.labels_), missing_(other.missing_.load()) {}

CsvPatchClassifier::CsvPatchClassifier(CsvPatchClassifier&& other) noexcept
    : labels_(std::move(other.labels_)), missing_(other.missing_.load()) {}

CsvPatchClassifier CsvPatchClassifier::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return from_stream(in, path.string());
}

CsvPatchClassifier CsvPatchClassifier::from_stream(std::istream& in,
                                                   const std::string& name) {
  CsvPatchClassifier result;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kFormat, name + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "row,col,size,label") {
    throw Error(ErrorCode::kFormat, name + ": expected header row,col,size,label");
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    int row = 0, col = 0, size = 0, label = 0;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(fields >> row >> c1 >> col >> c2 >> size >> c3 >> label) || c1 != ',' ||
        c2 != ',' || c3 != ',' || (label != 0 && label != 1) || !(fields >> std::ws).eof()) {
      throw Error(ErrorCode::kFormat,
                  name + ":" + std::to_string(line_no) + ": malformed patch label");
    }
    result.labels_[{row, col, size}] = label == 1;
  }
  return result;
}

bool CsvPatchClassifier::classify(const Patch& patch, const ProbabilityMap&) const {
  const auto it = labels_.find({patch.row, patch.col, patch.size});
  if (it == labels_.end()) {
    missing_.fetch_add(1);
    return false;
  }
  return it->second;
}

namespace {

void require_matching(const PatchGrid& grid, Eigen::Index rows, Eigen::Index cols) {
  if (rows != grid.height || cols != grid.width) {
    throw Error(ErrorCode::kInconsistentInput,
                "patch grid does not match the image dimensions");
  }
}

}  // namespace

VoteMap vote(const PatchGrid& grid, const PatchClassifier& classifier,
             const ProbabilityMap& image) {
  require_matching(grid, image.rows(), image.cols());
  VoteMap votes = VoteMap::Zero(grid.height, grid.width);
  for (const Patch& patch : grid.patches) {
    if (classifier.classify(patch, image)) {
      votes.block(patch.row, patch.col, patch.size, patch.size) += 1;
    }
  }
  return votes;
}

VoteMap coverage(const PatchGrid& grid) {
  VoteMap counts = VoteMap::Zero(grid.height, grid.width);
  for (const Patch& patch : grid.patches) {
    counts.block(patch.row, patch.col, patch.size, patch.size) += 1;
  }
  return counts;
}

BinaryMask threshold_votes(const VoteMap& votes, int nu) {
  if (nu < 1 || nu > 4) {
    throw Error(ErrorCode::kInvalidParameter, "vote threshold must lie in 1..4");
  }
  return votes >= nu;
}

}  // namespace vinemark
