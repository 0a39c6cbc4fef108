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
#include "vinemark/image_io.hpp"

#include <png.h>

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

namespace vinemark {

namespace {

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class PgmHeaderReader {
 public:
  PgmHeaderReader(const std::vector<unsigned char>& data, std::string name)
      : data_(data), name_(std::move(name)) {}

  long next_int() {
    skip_space_and_comments();
    if (pos_ >= data_.size() || !std::isdigit(data_[pos_])) fail("bad header");
    long value = 0;
    while (pos_ < data_.size() && std::isdigit(data_[pos_])) {
      value = value * 10 + (data_[pos_++] - '0');
      if (value > 1'000'000) fail("header value too large");
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= data_.size() || !std::isspace(data_[pos_])) fail("bad header");
    return pos_ + 1;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::kFormat, name_ + ": " + why);
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < data_.size()) {
      if (std::isspace(data_[pos_])) {
        ++pos_;
      } else if (data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& data_;
  std::string name_;
  std::size_t pos_ = 2;
};

GrayImage decode_pgm(const std::vector<unsigned char>& data,
                     const std::string& name) {
  PgmHeaderReader header(data, name);
  const long width = header.next_int();
  const long height = header.next_int();
  const long maxval = header.next_int();
  const std::size_t offset = header.raster_offset();
  if (width <= 0 || height <= 0) header.fail("empty image");
  if (maxval <= 0 || maxval > 65535) header.fail("maxval out of range");

  const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
  const auto count = static_cast<std::size_t>(width * height);
  if (data.size() < offset + count * bytes_per_sample) header.fail("truncated raster");

  GrayImage image;
  image.max_value = bytes_per_sample == 2 ? 65535 : 255;
  image.pixels.resize(height, width);
  const unsigned char* src = data.data() + offset;
  std::uint16_t* dst = image.pixels.data();
  for (std::size_t i = 0; i < count; ++i) {
    dst[i] = bytes_per_sample == 2
                 ? static_cast<std::uint16_t>((src[2 * i] << 8) | src[2 * i + 1])
                 : src[i];
  }
  // Samples are scaled to the nominal depth when the file uses a smaller
  // maxval (e.g. a 0/1 mask written with maxval 1).
  if (maxval != image.max_value) {
    const double scale = static_cast<double>(image.max_value) / static_cast<double>(maxval);
    for (std::size_t i = 0; i < count; ++i) {
      const double v = std::min<double>(dst[i], static_cast<double>(maxval));
      dst[i] = static_cast<std::uint16_t>(std::lround(v * scale));
    }
  }
  return image;
}

struct PngReadState {
  const std::vector<unsigned char>* data;
  std::size_t pos;
};

void png_read_from_buffer(png_structp png, png_bytep out, png_size_t length) {
  auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (state->pos + length > state->data->size()) png_error(png, "truncated PNG");
  std::copy_n(state->data->data() + state->pos, length, out);
  state->pos += length;
}

GrayImage decode_png(const std::vector<unsigned char>& data, const std::string& name) {
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw Error(ErrorCode::kIo, "libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorCode::kIo, "libpng init failed");
  }
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_read_struct(png, info, nullptr); }
  } guard{&png, &info};

  GrayImage image;
  // Everything with a destructor lives above setjmp.
  std::vector<png_bytep> rows;
  std::vector<unsigned char> buffer;
  PngReadState state{&data, 0};
  if (setjmp(png_jmpbuf(png))) {
    throw Error(ErrorCode::kFormat, name + ": corrupt PNG");
  }
  png_set_read_fn(png, &state, png_read_from_buffer);
  png_read_info(png, info);
  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  if (color_type != PNG_COLOR_TYPE_GRAY || bit_depth > 8) {
    throw Error(ErrorCode::kFormat, name + ": only 8-bit grayscale PNG is supported");
  }
  if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);

  buffer.resize(static_cast<std::size_t>(width) * height);
  rows.resize(height);
  for (png_uint_32 r = 0; r < height; ++r) rows[r] = buffer.data() + r * width;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);

  image.max_value = 255;
  image.pixels = Eigen::Map<const Raster<unsigned char>>(buffer.data(), height, width)
                     .cast<std::uint16_t>();
  return image;
}

}  // namespace

GrayImage read_gray(const std::filesystem::path& path) {
  const std::vector<unsigned char> data = slurp(path);
  static constexpr std::array<unsigned char, 8> kPngMagic = {0x89, 'P', 'N', 'G',
                                                             '\r', '\n', 0x1a, '\n'};
  if (data.size() >= 8 && std::equal(kPngMagic.begin(), kPngMagic.end(), data.begin())) {
    return decode_png(data, path.string());
  }
  if (data.size() >= 2 && data[0] == 'P' && data[1] == '5') {
    return decode_pgm(data, path.string());
  }
  throw Error(ErrorCode::kFormat, path.string() + ": not a P5 PGM or PNG file");
}

ProbabilityMap read_probability_map(const std::filesystem::path& path) {
  const GrayImage image = read_gray(path);
  return image.pixels.cast<double>() / static_cast<double>(image.max_value);
}

BinaryMask read_mask(const std::filesystem::path& path) {
  return read_gray(path).pixels > 0;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  if (image.max_value != 255 && image.max_value != 65535) {
    throw Error(ErrorCode::kInvalidParameter, "PGM max value must be 255 or 65535");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << "P5\n" << image.pixels.cols() << ' ' << image.pixels.rows() << '\n'
      << image.max_value << '\n';
  std::vector<char> raster;
  const bool wide = image.max_value > 255;
  raster.reserve(static_cast<std::size_t>(image.pixels.size()) * (wide ? 2 : 1));
  for (Eigen::Index i = 0; i < image.pixels.size(); ++i) {
    const std::uint16_t v = image.pixels.data()[i];
    if (wide) raster.push_back(static_cast<char>(v >> 8));
    raster.push_back(static_cast<char>(v & 0xff));
  }
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

void write_mask(const std::filesystem::path& path, const BinaryMask& mask) {
  GrayImage image;
  image.pixels = mask.cast<std::uint16_t>() * std::uint16_t{255};
  write_pgm(path, image);
}

void write_votes(const std::filesystem::path& path, const VoteMap& votes) {
  if ((votes < 0).any() || (votes > 255).any()) {
    throw Error(ErrorCode::kInvalidParameter, "vote counts do not fit in 8 bits");
  }
  GrayImage image;
  image.pixels = votes.cast<std::uint16_t>();
  write_pgm(path, image);
}

void write_probability_map(const std::filesystem::path& path,
                           const ProbabilityMap& map) {
  validate_probability_map(map);
  GrayImage image;
  image.max_value = 65535;
  image.pixels = (map * 65535.0).round().cast<std::uint16_t>();
  write_pgm(path, image);
}

}  // namespace vinemark
