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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "uhdiqa/error.hpp"
#include "uhdiqa/image.hpp"
#include "uhdiqa/rng.hpp"

namespace uhdiqa {

// ---------------------------------------------------------------------------
// View descriptions

/// Grid mini-patch ("fragment") sampling: the image is cut into grid_n x grid_n
/// cells with floor boundaries, one fragment_n x fragment_n patch is taken at a
/// random offset inside every cell, and the patches are spliced in grid order
/// into an output_k x output_k mosaic (output_k = grid_n * fragment_n).
struct GridSampleSpec {
  int grid_n = 16;
  int fragment_n = 24;
  int output_k = 384;
  std::uint64_t seed = 0;
};

struct CenterCrop {
  int width = 0;
  int height = 0;
};

/// Bilinear resize. height == 0 keeps the source aspect ratio.
struct Resize {
  int width = 0;
  int height = 0;
};

struct CropThenResize {
  int crop_width = 0;
  int crop_height = 0;
  int width = 0;
  int height = 0;
};

struct PatchShuffle {
  int rows = 3;
  int cols = 3;
  std::uint64_t seed = 0;
};

/// One cell of an even rows x cols division (same truncation as PatchShuffle).
struct Tile {
  int rows = 3;
  int cols = 3;
  int index = 0;
};

struct Identity {};

struct ViewSpec {
  std::variant<Identity, GridSampleSpec, CenterCrop, Resize, CropThenResize, PatchShuffle, Tile> kind;
  /// Optional resize applied after the main transform.
  std::optional<Resize> resize_to;

  bool stochastic() const {
    return std::holds_alternative<GridSampleSpec>(kind) || std::holds_alternative<PatchShuffle>(kind);
  }
};

struct ViewSet {
  std::string name;
  std::vector<ViewSpec> views;

  bool stochastic() const {
    for (const auto& v : views)
      if (v.stochastic()) return true;
    return false;
  }
};

// ---------------------------------------------------------------------------
// Operations

/// Row/column bounds [begin, end) of grid cell `i` along an axis of `extent`
/// pixels split into `n` cells.
inline std::pair<int, int> grid_cell_bounds(int extent, int n, int i) {
  const auto e = static_cast<std::int64_t>(extent);
  return {static_cast<int>(i * e / n), static_cast<int>((i + 1) * e / n)};
}

inline void validate(const GridSampleSpec& s) {
  if (s.grid_n < 1 || s.fragment_n < 1)
    fail(ErrorCode::InvalidView, "grid_n and fragment_n must be >= 1");
  if (static_cast<std::int64_t>(s.output_k) != static_cast<std::int64_t>(s.grid_n) * s.fragment_n)
    fail(ErrorCode::InvalidView, "output_k must equal grid_n * fragment_n (" + std::to_string(s.grid_n) + " * " +
                                     std::to_string(s.fragment_n) + " != " + std::to_string(s.output_k) + ")");
}

/// Fragment offsets inside cell (i, j) come from the stream
/// derive_seed(seed, {i, j}): first the row offset, then the column offset,
/// each uniform over the valid positions. Traversal order is irrelevant.
inline Image grid_sample(const Image& img, const GridSampleSpec& spec) {
  validate(spec);
  const int N = spec.grid_n;
  const int n = spec.fragment_n;
  if (img.height() / N < n || img.width() / N < n)
    fail(ErrorCode::CellTooSmall, "a " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                                      " image split " + std::to_string(N) + "x" + std::to_string(N) +
                                      " cannot host " + std::to_string(n) + "x" + std::to_string(n) + " fragments");

  Image out(spec.output_k, spec.output_k);
  for (int i = 0; i < N; ++i) {
    const auto [y0, y1] = grid_cell_bounds(img.height(), N, i);
    for (int j = 0; j < N; ++j) {
      const auto [x0, x1] = grid_cell_bounds(img.width(), N, j);
      SplitMix64 rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)}));
      const auto oy = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(y1 - y0 - n + 1)));
      const auto ox = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(x1 - x0 - n + 1)));
      copy_block(img, x0 + ox, y0 + oy, n, n, out, j * n, i * n);
    }
  }
  return out;
}

/// Centered w x h region; an odd margin leaves the extra pixel on the
/// right/bottom.
inline Image center_crop(const Image& img, int w, int h) {
  if (w < 1 || h < 1) fail(ErrorCode::InvalidView, "crop dimensions must be positive");
  if (w > img.width() || h > img.height())
    fail(ErrorCode::CropLargerThanImage, std::to_string(w) + "x" + std::to_string(h) + " crop from a " +
                                             std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                                             " image");
  return crop(img, (img.width() - w) / 2, (img.height() - h) / 2, w, h);
}

namespace detail {

struct AxisSample {
  int lo = 0;
  int hi = 0;
  double frac = 0.0;
};

// Half-pixel-centre mapping, clamped to the source extent.
inline std::vector<AxisSample> bilinear_axis(int src, int dst) {
  std::vector<AxisSample> out(static_cast<std::size_t>(dst));
  const double scale = static_cast<double>(src) / static_cast<double>(dst);
  for (int d = 0; d < dst; ++d) {
    double s = (static_cast<double>(d) + 0.5) * scale - 0.5;
    if (s < 0.0) s = 0.0;
    const double max_s = static_cast<double>(src - 1);
    if (s > max_s) s = max_s;
    const int lo = static_cast<int>(std::floor(s));
    out[static_cast<std::size_t>(d)] = {lo, std::min(lo + 1, src - 1), s - lo};
  }
  return out;
}

}  // namespace detail

/// Bilinear interpolation with half-pixel centres; results are rounded half
/// away from zero.
inline Image resize(const Image& img, int w, int h) {
  if (w < 1 || h < 1) fail(ErrorCode::InvalidView, "resize target must be positive");
  if (w == img.width() && h == img.height()) return img;
  const auto xs = detail::bilinear_axis(img.width(), w);
  const auto ys = detail::bilinear_axis(img.height(), h);
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    const auto& sy = ys[static_cast<std::size_t>(y)];
    for (int x = 0; x < w; ++x) {
      const auto& sx = xs[static_cast<std::size_t>(x)];
      const auto* a = img.pixel(sx.lo, sy.lo);
      const auto* b = img.pixel(sx.hi, sy.lo);
      const auto* c = img.pixel(sx.lo, sy.hi);
      const auto* d = img.pixel(sx.hi, sy.hi);
      auto* o = out.pixel(x, y);
      for (int ch = 0; ch < Image::kChannels; ++ch) {
        const double top = (1.0 - sx.frac) * a[ch] + sx.frac * b[ch];
        const double bot = (1.0 - sx.frac) * c[ch] + sx.frac * d[ch];
        const double v = std::round((1.0 - sy.frac) * top + sy.frac * bot);
        o[ch] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
      }
    }
  }
  return out;
}

inline Image resize(const Image& img, const Resize& r) {
  int h = r.height;
  if (h == 0) {
    h = static_cast<int>(std::lround(static_cast<double>(img.height()) * r.width / img.width()));
    h = std::max(h, 1);
  }
  return resize(img, r.width, h);
}

inline void validate_division(int rows, int cols, const Image& img) {
  if (rows < 1 || cols < 1) fail(ErrorCode::InvalidView, "rows and cols must be >= 1");
  if (img.height() < rows || img.width() < cols)
    fail(ErrorCode::InvalidView, "image smaller than the requested " + std::to_string(rows) + "x" +
                                     std::to_string(cols) + " division");
}

/// Cuts the image into rows x cols equal patches (truncating remainder pixels
/// on the right/bottom) and reassembles them in a seeded Fisher-Yates order.
/// Output slot k holds source patch perm[k] where
/// perm = random_permutation(rows * cols, seed).
inline Image patch_shuffle(const Image& img, int rows, int cols, std::uint64_t seed) {
  validate_division(rows, cols, img);
  if (rows * cols < 2) fail(ErrorCode::InvalidView, "patch_shuffle needs at least 2 patches");
  const int ph = img.height() / rows;
  const int pw = img.width() / cols;
  const auto perm = random_permutation(static_cast<std::size_t>(rows) * cols, seed);
  Image out(pw * cols, ph * rows);
  for (std::size_t k = 0; k < perm.size(); ++k) {
    const int src_r = static_cast<int>(perm[k]) / cols, src_c = static_cast<int>(perm[k]) % cols;
    const int dst_r = static_cast<int>(k) / cols, dst_c = static_cast<int>(k) % cols;
    copy_block(img, src_c * pw, src_r * ph, pw, ph, out, dst_c * pw, dst_r * ph);
  }
  return out;
}

inline Image tile(const Image& img, int rows, int cols, int index) {
  validate_division(rows, cols, img);
  if (index < 0 || index >= rows * cols) fail(ErrorCode::InvalidView, "tile index out of range");
  const int ph = img.height() / rows;
  const int pw = img.width() / cols;
  return crop(img, (index % cols) * pw, (index / cols) * ph, pw, ph);
}

inline Image apply_view(const Image& img, const ViewSpec& view) {
  Image out = std::visit(
      [&](const auto& v) -> Image {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Identity>) return img;
        else if constexpr (std::is_same_v<T, GridSampleSpec>) return grid_sample(img, v);
        else if constexpr (std::is_same_v<T, CenterCrop>) return center_crop(img, v.width, v.height);
        else if constexpr (std::is_same_v<T, Resize>) return resize(img, v);
        else if constexpr (std::is_same_v<T, CropThenResize>)
          return resize(center_crop(img, v.crop_width, v.crop_height), v.width, v.height);
        else if constexpr (std::is_same_v<T, PatchShuffle>) return patch_shuffle(img, v.rows, v.cols, v.seed);
        else return tile(img, v.rows, v.cols, v.index);
      },
      view.kind);
  if (view.resize_to) out = resize(out, *view.resize_to);
  return out;
}

/// One output per view, in order. Failures are re-raised with the view index.
inline std::vector<Image> materialize_view_set(const Image& img, const ViewSet& set) {
  if (set.views.empty()) fail(ErrorCode::InvalidView, "view set '" + set.name + "' is empty");
  std::vector<Image> out;
  out.reserve(set.views.size());
  for (std::size_t k = 0; k < set.views.size(); ++k) {
    try {
      out.push_back(apply_view(img, set.views[k]));
    } catch (const Error& e) {
      throw Error(e.code(), "view " + std::to_string(k) + ": " + e.what());
    }
  }
  return out;
}

/// Replaces the seed of every stochastic view with derive_seed(root, {k, seed}),
/// k being the view index. Deterministic views are left untouched.
inline ViewSet reseed(ViewSet set, std::uint64_t root) {
  for (std::size_t k = 0; k < set.views.size(); ++k) {
    std::visit(
        [&](auto& v) {
          if constexpr (requires { v.seed; }) v.seed = derive_seed(root, {static_cast<std::uint64_t>(k), v.seed});
        },
        set.views[k].kind);
  }
  return set;
}

// ---------------------------------------------------------------------------
// JSON form: {"name": ..., "views": [{"kind": ..., params..., "seed": ...}]}

inline ViewSpec view_from_json(const nlohmann::json& j) {
  auto get_int = [&](const char* key) -> int {
    if (!j.contains(key) || !j.at(key).is_number_integer())
      fail(ErrorCode::InvalidView, std::string("view is missing integer field '") + key + "'");
    return j.at(key).get<int>();
  };
  auto positive = [&](const char* key) {
    const int v = get_int(key);
    if (v < 1) fail(ErrorCode::InvalidView, std::string("field '") + key + "' must be positive");
    return v;
  };
  const std::string kind = j.value("kind", "");
  const auto seed = j.value<std::uint64_t>("seed", 0);
  ViewSpec v;
  if (kind == "identity") {
    v.kind = Identity{};
  } else if (kind == "grid_sample") {
    GridSampleSpec g{positive("grid_n"), positive("fragment_n"), 0, seed};
    g.output_k = j.contains("output_k") ? positive("output_k") : g.grid_n * g.fragment_n;
    validate(g);
    v.kind = g;
  } else if (kind == "center_crop") {
    v.kind = CenterCrop{positive("width"), positive("height")};
  } else if (kind == "resize") {
    v.kind = Resize{positive("width"), j.contains("height") ? positive("height") : 0};
  } else if (kind == "crop_then_resize") {
    v.kind = CropThenResize{positive("crop_width"), positive("crop_height"), positive("width"), positive("height")};
  } else if (kind == "patch_shuffle") {
    PatchShuffle p{positive("rows"), positive("cols"), seed};
    if (p.rows * p.cols < 2) fail(ErrorCode::InvalidView, "patch_shuffle needs rows * cols >= 2");
    v.kind = p;
  } else if (kind == "tile") {
    Tile t{positive("rows"), positive("cols"), get_int("index")};
    if (t.index < 0 || t.index >= t.rows * t.cols) fail(ErrorCode::InvalidView, "tile index out of range");
    v.kind = t;
  } else {
    fail(ErrorCode::InvalidView, "unknown view kind '" + kind + "'");
  }
  if (j.contains("resize_to")) {
    const auto& r = j.at("resize_to");
    if (!r.is_array() || r.size() != 2) fail(ErrorCode::InvalidView, "resize_to must be [width, height]");
    const int w = r[0].get<int>(), h = r[1].get<int>();
    if (w < 1 || h < 1) fail(ErrorCode::InvalidView, "resize_to must be positive");
    v.resize_to = Resize{w, h};
  }
  return v;
}

inline nlohmann::json view_to_json(const ViewSpec& view) {
  nlohmann::json j = std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Identity>) return {{"kind", "identity"}};
        else if constexpr (std::is_same_v<T, GridSampleSpec>)
          return {{"kind", "grid_sample"}, {"grid_n", v.grid_n}, {"fragment_n", v.fragment_n},
                  {"output_k", v.output_k}, {"seed", v.seed}};
        else if constexpr (std::is_same_v<T, CenterCrop>)
          return {{"kind", "center_crop"}, {"width", v.width}, {"height", v.height}};
        else if constexpr (std::is_same_v<T, Resize>) {
          nlohmann::json r = {{"kind", "resize"}, {"width", v.width}};
          if (v.height) r["height"] = v.height;
          return r;
        } else if constexpr (std::is_same_v<T, CropThenResize>)
          return {{"kind", "crop_then_resize"}, {"crop_width", v.crop_width}, {"crop_height", v.crop_height},
                  {"width", v.width}, {"height", v.height}};
        else if constexpr (std::is_same_v<T, PatchShuffle>)
          return {{"kind", "patch_shuffle"}, {"rows", v.rows}, {"cols", v.cols}, {"seed", v.seed}};
        else
          return {{"kind", "tile"}, {"rows", v.rows}, {"cols", v.cols}, {"index", v.index}};
      },
      view.kind);
  if (view.resize_to) j["resize_to"] = {view.resize_to->width, view.resize_to->height};
  return j;
}

inline ViewSet view_set_from_json(const nlohmann::json& j) {
  ViewSet set;
  set.name = j.value("name", "views");
  if (!j.contains("views") || !j.at("views").is_array() || j.at("views").empty())
    fail(ErrorCode::InvalidView, "view set needs a nonempty 'views' array");
  for (std::size_t k = 0; k < j.at("views").size(); ++k) {
    try {
      set.views.push_back(view_from_json(j.at("views")[k]));
    } catch (const Error& e) {
      throw Error(e.code(), "view " + std::to_string(k) + ": " + e.what());
    }
  }
  return set;
}

inline nlohmann::json view_set_to_json(const ViewSet& set) {
  nlohmann::json views = nlohmann::json::array();
  for (const auto& v : set.views) views.push_back(view_to_json(v));
  return {{"name", set.name}, {"views", views}};
}

// ---------------------------------------------------------------------------
// Presets mirroring published input strategies. Crop sizes assume UHD-1
// (3840 x 2160) sources.

namespace presets {

/// Centre 1920x960 crop resized to 1280x720.
inline ViewSet baseline() {
  return {"baseline", {ViewSpec{CropThenResize{1920, 960, 1280, 720}, {}}}};
}

/// Three branches: global 480x480 resize, 15x15 grid of 32px fragments,
/// centre 480x480 crop.
inline ViewSet three_branch(std::uint64_t seed = 0) {
  return {"three_branch",
          {ViewSpec{Resize{480, 480}, {}}, ViewSpec{GridSampleSpec{15, 32, 480, seed}, {}},
           ViewSpec{CenterCrop{480, 480}, {}}}};
}

/// 16x16 grid of 24px fragments into a 384x384 mosaic.
inline ViewSet grid_mini_patch(std::uint64_t seed = 0) {
  return {"grid_mini_patch", {ViewSpec{GridSampleSpec{16, 24, 384, seed}, {}}}};
}

/// Full, quarter (width 960) and tiny (width 256) resolution inputs.
inline ViewSet multi_scale() {
  return {"multi_scale", {ViewSpec{Identity{}, {}}, ViewSpec{Resize{960, 0}, {}}, ViewSpec{Resize{256, 0}, {}}}};
}

/// 1:1, 1:2 and 1:3 (height:width) centre crops, each 360 px high.
inline ViewSet aspect_ratios() {
  return {"aspect_ratios",
          {ViewSpec{CropThenResize{2160, 2160, 360, 360}, {}}, ViewSpec{CropThenResize{3840, 1920, 720, 360}, {}},
           ViewSpec{CropThenResize{3840, 1280, 1080, 360}, {}}}};
}

/// Whole image, its nine 3x3 tiles and a shuffled reassembly, all at 224x224.
inline ViewSet nine_patch_shuffle(std::uint64_t seed = 0) {
  ViewSet s{"nine_patch_shuffle", {ViewSpec{Resize{224, 224}, {}}}};
  for (int k = 0; k < 9; ++k) s.views.push_back(ViewSpec{Tile{3, 3, k}, Resize{224, 224}});
  s.views.push_back(ViewSpec{PatchShuffle{3, 3, seed}, Resize{224, 224}});
  return s;
}

}  // namespace presets

}  // namespace uhdiqa
