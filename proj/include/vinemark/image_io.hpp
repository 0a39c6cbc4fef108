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
#ifndef VINEMARK_IMAGE_IO_HPP
#define VINEMARK_IMAGE_IO_HPP

#include <cstdint>
#include <filesystem>

#include "vinemark/raster.hpp"

namespace vinemark {

/// A decoded single-channel image; `max_value` is 255 or 65535.
struct GrayImage {
  Raster<std::uint16_t> pixels;
  int max_value = 255;
};

/// Reads binary PGM (P5, 8 or 16 bit) or 8-bit grayscale PNG, chosen by the
/// file's magic bytes.
GrayImage read_gray(const std::filesystem::path& path);

/// Values are mapped v / 255 or v / 65535.
ProbabilityMap read_probability_map(const std::filesystem::path& path);

/// Any non-zero pixel is bud.
BinaryMask read_mask(const std::filesystem::path& path);

void write_pgm(const std::filesystem::path& path, const GrayImage& image);

/// Bud pixels are written as 255.
void write_mask(const std::filesystem::path& path, const BinaryMask& mask);

/// Raw vote counts, 8-bit.
void write_votes(const std::filesystem::path& path, const VoteMap& votes);

/// 16-bit PGM, round(v * 65535).
void write_probability_map(const std::filesystem::path& path,
                           const ProbabilityMap& map);

}  // namespace vinemark

#endif  // VINEMARK_IMAGE_IO_HPP
