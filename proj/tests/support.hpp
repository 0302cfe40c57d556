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

// Fixtures shared by the unit and acceptance suites.

#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "uhdiqa/image.hpp"
#include "uhdiqa/rng.hpp"

namespace testing_support {

namespace fs = std::filesystem;

inline uhdiqa::Image noise_image(int w, int h, std::uint64_t seed) {
  uhdiqa::SplitMix64 rng(seed);
  uhdiqa::Image img(w, h);
  for (auto& b : img.data()) b = static_cast<std::uint8_t>(rng() >> 56);
  return img;
}

/// Pixel (x, y) encodes its own coordinates, so any copied block can be
/// traced back to its source position.
inline uhdiqa::Image coordinate_image(int w, int h) {
  uhdiqa::Image img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      auto* p = img.pixel(x, y);
      p[0] = static_cast<std::uint8_t>(x & 0xFF);
      p[1] = static_cast<std::uint8_t>(y & 0xFF);
      p[2] = static_cast<std::uint8_t>(((x >> 8) & 0xF) | (((y >> 8) & 0xF) << 4));
    }
  return img;
}

/// Separable box blur of the given radius, applied `passes` times.
inline uhdiqa::Image box_blur(const uhdiqa::Image& src, int radius, int passes = 1) {
  uhdiqa::Image cur = src;
  const int w = src.width(), h = src.height();
  for (int pass = 0; pass < passes && radius > 0; ++pass) {
    uhdiqa::Image tmp(w, h), out(w, h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int c = 0; c < 3; ++c) {
          int s = 0, n = 0;
          for (int d = -radius; d <= radius; ++d) {
            const int xx = std::clamp(x + d, 0, w - 1);
            s += cur.pixel(xx, y)[c], ++n;
          }
          tmp.pixel(x, y)[c] = static_cast<std::uint8_t>((s + n / 2) / n);
        }
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int c = 0; c < 3; ++c) {
          int s = 0, n = 0;
          for (int d = -radius; d <= radius; ++d) {
            const int yy = std::clamp(y + d, 0, h - 1);
            s += tmp.pixel(x, yy)[c], ++n;
          }
          out.pixel(x, y)[c] = static_cast<std::uint8_t>((s + n / 2) / n);
        }
    cur = std::move(out);
  }
  return cur;
}

inline std::vector<double> random_vector(std::mt19937_64& g, std::size_t n, bool ties) {
  std::vector<double> v(n);
  if (ties) {
    std::uniform_int_distribution<int> d(0, std::max<int>(2, static_cast<int>(n / 3)));
    for (auto& x : v) x = d(g) * 0.25;
  } else {
    std::normal_distribution<double> d(0.0, 1.0);
    for (auto& x : v) x = d(g);
  }
  return v;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("uhdiqa_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace testing_support
