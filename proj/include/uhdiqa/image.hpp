// Copyright 2026 The uhdiqa Authors.
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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uhdiqa/error.hpp"

namespace uhdiqa {

/// Interleaved 8-bit RGB image, row-major.
class Image {
 public:
  static constexpr int kChannels = 3;

  Image() = default;

  Image(int width, int height, std::uint8_t fill = 0) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * height * kChannels, fill);
  }

  Image(int width, int height, std::vector<std::uint8_t> data)
      : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * height * kChannels)
      fail(ErrorCode::InvalidInput, "pixel buffer length does not match " + std::to_string(width) + "x" +
                                        std::to_string(height) + "x3");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  std::size_t offset(int x, int y) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * kChannels;
  }
  const std::uint8_t* pixel(int x, int y) const noexcept { return data_.data() + offset(x, y); }
  std::uint8_t* pixel(int x, int y) noexcept { return data_.data() + offset(x, y); }

  std::span<const std::uint8_t> row(int y) const noexcept {
    return {data_.data() + offset(0, y), static_cast<std::size_t>(width_) * kChannels};
  }
  std::span<std::uint8_t> row(int y) noexcept {
    return {data_.data() + offset(0, y), static_cast<std::size_t>(width_) * kChannels};
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  static void check_dims(int w, int h) {
    if (w < 1 || h < 1)
      fail(ErrorCode::InvalidInput, "image dimensions must be positive, got " + std::to_string(w) + "x" +
                                        std::to_string(h));
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Copies the w x h block whose top-left corner is (x0, y0) in `src` into
/// `dst` at (dx, dy). Caller guarantees both rectangles are in bounds.
inline void copy_block(const Image& src, int x0, int y0, int w, int h, Image& dst, int dx, int dy) {
  const std::size_t bytes = static_cast<std::size_t>(w) * Image::kChannels;
  for (int r = 0; r < h; ++r) {
    const auto* s = src.pixel(x0, y0 + r);
    auto* d = dst.pixel(dx, dy + r);
    std::copy(s, s + bytes, d);
  }
}

inline Image crop(const Image& src, int x0, int y0, int w, int h) {
  Image out(w, h);
  copy_block(src, x0, y0, w, h, out, 0, 0);
  return out;
}

}  // namespace uhdiqa
