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
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "uhdiqa/error.hpp"
#include "uhdiqa/image.hpp"
#include "uhdiqa/views.hpp"

namespace uhdiqa {

struct FeatureVector {
  std::vector<std::string> names;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
};

/// Per-view handcrafted descriptors, in this order.
inline constexpr std::array<const char*, 8> kFeatureNames = {
    "lum_mean", "lum_std", "laplacian_var", "rms_contrast", "colorfulness", "gradient_mean", "entropy", "noise_mad"};

/// BT.601 luma in [0, 255].
inline std::vector<double> luminance(const Image& img) {
  std::vector<double> y(static_cast<std::size_t>(img.width()) * img.height());
  const auto d = img.data();
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = 0.299 * d[3 * i] + 0.587 * d[3 * i + 1] + 0.114 * d[3 * i + 2];
  return y;
}

namespace detail {

inline std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double s = 0.0;
  for (double x : v) s += x;
  const double m = s / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / static_cast<double>(v.size()))};
}

// 4-neighbour Laplacian over interior pixels.
inline std::vector<double> laplacian(const std::vector<double>& y, int w, int h) {
  std::vector<double> out;
  if (w < 3 || h < 3) return out;
  out.reserve(static_cast<std::size_t>(w - 2) * (h - 2));
  for (int r = 1; r < h - 1; ++r)
    for (int c = 1; c < w - 1; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      out.push_back(y[i - 1] + y[i + 1] + y[i - w] + y[i + w] - 4.0 * y[i]);
    }
  return out;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  return m;
}

}  // namespace detail

/// Descriptors of a single image:
/// - lum_mean, lum_std: luma moments
/// - laplacian_var: variance of the Laplacian (sharpness)
/// - rms_contrast: lum_std / lum_mean (0 for black images)
/// - colorfulness: Hasler-Suesstrunk, sigma_rgyb + 0.3 mu_rgyb
/// - gradient_mean: mean central-difference gradient magnitude
/// - entropy: Shannon entropy (bits) of a 64-bin luma histogram
/// - noise_mad: 1.4826 * MAD of the Laplacian / sqrt(20), a robust sigma
inline std::array<double, kFeatureNames.size()> image_features(const Image& img) {
  const int w = img.width(), h = img.height();
  const auto y = luminance(img);
  const auto [mean, sd] = detail::mean_std(y);

  const auto lap = detail::laplacian(y, w, h);
  const double lap_sd = detail::mean_std(lap).second;
  const double lap_var = lap_sd * lap_sd;

  const auto d = img.data();
  std::vector<double> rg(y.size()), yb(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = d[3 * i], g = d[3 * i + 1], b = d[3 * i + 2];
    rg[i] = r - g;
    yb[i] = 0.5 * (r + g) - b;
  }
  const auto [mrg, srg] = detail::mean_std(rg);
  const auto [myb, syb] = detail::mean_std(yb);
  const double colorfulness = std::sqrt(srg * srg + syb * syb) + 0.3 * std::sqrt(mrg * mrg + myb * myb);

  double grad = 0.0;
  if (w >= 3 && h >= 3) {
    for (int r = 1; r < h - 1; ++r)
      for (int c = 1; c < w - 1; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * w + c;
        const double gx = 0.5 * (y[i + 1] - y[i - 1]);
        const double gy = 0.5 * (y[i + w] - y[i - w]);
        grad += std::sqrt(gx * gx + gy * gy);
      }
    grad /= static_cast<double>(w - 2) * (h - 2);
  }

  std::array<double, 64> hist{};
  for (double v : y) hist[static_cast<std::size_t>(std::min(63.0, std::floor(v / 4.0)))] += 1.0;
  double entropy = 0.0;
  for (double c : hist)
    if (c > 0.0) {
      const double pr = c / static_cast<double>(y.size());
      entropy -= pr * std::log2(pr);
    }

  double noise = 0.0;
  if (!lap.empty()) {
    const double med = detail::median(lap);
    std::vector<double> dev(lap.size());
    for (std::size_t i = 0; i < lap.size(); ++i) dev[i] = std::abs(lap[i] - med);
    noise = 1.4826 * detail::median(std::move(dev)) / std::sqrt(20.0);
  }

  return {mean, sd, lap_var, mean > 0.0 ? sd / mean : 0.0, colorfulness, grad, entropy, noise};
}

/// Features of every view, concatenated in view order and named
/// "v<index>.<feature>".
inline FeatureVector extract_features(const Image& img, const ViewSet& set) {
  const auto views = materialize_view_set(img, set);
  FeatureVector fv;
  fv.names.reserve(views.size() * kFeatureNames.size());
  fv.values.reserve(views.size() * kFeatureNames.size());
  for (std::size_t k = 0; k < views.size(); ++k) {
    const auto f = image_features(views[k]);
    for (std::size_t i = 0; i < f.size(); ++i) {
      fv.names.push_back("v" + std::to_string(k) + "." + kFeatureNames[i]);
      fv.values.push_back(f[i]);
    }
  }
  return fv;
}

inline std::vector<std::string> feature_names(const ViewSet& set) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < set.views.size(); ++k)
    for (const char* f : kFeatureNames) names.push_back("v" + std::to_string(k) + "." + f);
  return names;
}

}  // namespace uhdiqa
