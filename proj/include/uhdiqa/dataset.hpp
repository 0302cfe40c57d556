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
#include <cctype>
#include <iterator>
#include <tuple>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

#include "uhdiqa/csv.hpp"
#include "uhdiqa/error.hpp"

namespace uhdiqa {

enum class Split { Train, Validation, Test };

inline std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
  }
  return "?";
}

inline Split parse_split(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "validation" || s == "val") return Split::Validation;
  if (s == "test") return Split::Test;
  fail(ErrorCode::InvalidSplit, "unknown split '" + std::string(s) + "'");
}

struct ManifestEntry {
  std::string image_id;
  std::filesystem::path path;
  double mos = 0.0;
  Split split = Split::Train;
  bool exclusive = false;
  std::vector<std::string> categories;
};

inline constexpr std::array<std::string_view, 6> kManifestColumns = {
    "image_id", "path", "mos", "split", "exclusive", "categories"};

namespace detail {

inline bool parse_bool(const std::string& s, std::size_t line) {
  std::string l = s;
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
  if (l == "true" || l == "1" || l == "yes") return true;
  if (l == "false" || l == "0" || l == "no" || l.empty()) return false;
  fail(ErrorCode::ParseError, "row " + std::to_string(line) + ": bad exclusive flag '" + s + "'");
}

}  // namespace detail

/// Parses a manifest with header `image_id,path,mos,split,exclusive,categories`.
/// Relative image paths are resolved against `base_dir`. Validation errors
/// name the offending line.
inline std::vector<ManifestEntry> parse_manifest(std::istream& in,
                                                 const std::filesystem::path& base_dir = {}) {
  const csv::Table t = csv::read(in);
  std::array<std::size_t, 6> col{};
  for (std::size_t k = 0; k < kManifestColumns.size(); ++k) {
    const auto c = t.column(kManifestColumns[k]);
    if (c < 0) fail(ErrorCode::MissingColumn, "manifest lacks column '" + std::string(kManifestColumns[k]) + "'");
    col[k] = static_cast<std::size_t>(c);
  }

  std::vector<ManifestEntry> out;
  out.reserve(t.rows.size());
  std::unordered_set<std::string> seen;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::size_t line = t.line_numbers[r];
    const std::string where = "row " + std::to_string(line);

    ManifestEntry e;
    e.image_id = row[col[0]];
    if (e.image_id.empty()) fail(ErrorCode::ParseError, where + ": empty image_id");
    if (!seen.insert(e.image_id).second)
      fail(ErrorCode::DuplicateImageId, where + ": duplicate image_id '" + e.image_id + "'");

    std::filesystem::path p(row[col[1]]);
    e.path = (p.is_relative() && !base_dir.empty()) ? base_dir / p : p;

    e.mos = csv::parse_double(row[col[2]], where + " mos");
    if (!std::isfinite(e.mos)) fail(ErrorCode::NonFiniteMos, where + ": mos is not finite");

    e.split = parse_split(row[col[3]]);
    e.exclusive = detail::parse_bool(row[col[4]], line);
    if (e.exclusive && e.split == Split::Train)
      fail(ErrorCode::ExclusiveInTrain, where + ": '" + e.image_id + "' is exclusive but in train");

    const std::string& cats = row[col[5]];
    std::size_t start = 0;
    while (start <= cats.size()) {
      const auto end = std::min(cats.find(';', start), cats.size());
      auto c = csv::trim(std::string_view(cats).substr(start, end - start));
      if (!c.empty()) e.categories.push_back(std::move(c));
      start = end + 1;
    }
    out.push_back(std::move(e));
  }
  return out;
}

inline std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open manifest " + path.string());
  return parse_manifest(in, path.parent_path());
}

/// Entries of `split` carrying the exclusive flag. Only held-out splits have
/// an exclusive slice.
inline std::vector<ManifestEntry> filter_exclusive(const std::vector<ManifestEntry>& entries, Split split) {
  if (split == Split::Train) fail(ErrorCode::InvalidSplit, "the train split has no exclusive subset");
  std::vector<ManifestEntry> out;
  std::copy_if(entries.begin(), entries.end(), std::back_inserter(out),
               [split](const ManifestEntry& e) { return e.split == split && e.exclusive; });
  return out;
}

inline std::vector<ManifestEntry> filter_split(const std::vector<ManifestEntry>& entries, Split split) {
  std::vector<ManifestEntry> out;
  std::copy_if(entries.begin(), entries.end(), std::back_inserter(out),
               [split](const ManifestEntry& e) { return e.split == split; });
  return out;
}

// ---------------------------------------------------------------------------
// Split statistics and MOS densities

struct DensityBin {
  double center = 0.0;
  double density = 0.0;
};

struct SubsetDensity {
  std::string subset;
  std::vector<DensityBin> bins;
};

enum class DensityMethod { Histogram, GaussianKde };

struct StatsOptions {
  /// Subsets to report: "overall", "exclusive", or a split name.
  std::vector<std::string> subsets{"overall", "exclusive"};
  DensityMethod method = DensityMethod::Histogram;
  /// Fixed plotting range; defaults to [min mos, max mos] over all entries.
  std::optional<std::pair<double, double>> range;
};

struct SplitStats {
  std::map<Split, std::size_t> counts;
  std::map<Split, std::size_t> exclusive_counts;
  double bin_width = 0.0;
  std::vector<SubsetDensity> densities;

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& [_, c] : counts) n += c;
    return n;
  }
};

namespace detail {

inline std::vector<double> subset_mos(const std::vector<ManifestEntry>& entries, std::string_view subset) {
  std::vector<double> v;
  for (const auto& e : entries) {
    bool take = false;
    if (subset == "overall") take = true;
    else if (subset == "exclusive") take = e.exclusive;
    else take = e.split == parse_split(subset);
    if (take) v.push_back(e.mos);
  }
  return v;
}

// Silverman's rule of thumb: 0.9 * min(sd, IQR/1.34) * n^(-1/5).
inline double silverman_bandwidth(std::vector<double> v) {
  const auto n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  std::sort(v.begin(), v.end());
  auto quantile = [&](double q) {
    const double pos = q * (n - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  return 0.9 * spread * std::pow(n, -0.2);
}

}  // namespace detail

/// Per-split counts plus a unit-area MOS density for each requested subset.
/// All subsets share one binning so their curves are directly comparable.
inline SplitStats split_stats(const std::vector<ManifestEntry>& entries, std::size_t bins,
                              const StatsOptions& opts = {}) {
  if (entries.empty()) fail(ErrorCode::EmptySubset, "manifest has no entries");
  if (bins < 2) fail(ErrorCode::InvalidInput, "need at least 2 bins");

  SplitStats st;
  for (Split s : {Split::Train, Split::Validation, Split::Test}) {
    st.counts[s] = 0;
    st.exclusive_counts[s] = 0;
  }
  for (const auto& e : entries) {
    ++st.counts[e.split];
    if (e.exclusive) ++st.exclusive_counts[e.split];
  }

  double lo, hi;
  if (opts.range) {
    std::tie(lo, hi) = *opts.range;
    if (!(hi > lo)) fail(ErrorCode::InvalidInput, "density range must have hi > lo");
  } else {
    const auto [mn, mx] = std::minmax_element(entries.begin(), entries.end(),
                                              [](const auto& a, const auto& b) { return a.mos < b.mos; });
    lo = mn->mos;
    hi = mx->mos;
    if (hi == lo) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  st.bin_width = width;

  for (const auto& name : opts.subsets) {
    const auto values = detail::subset_mos(entries, name);
    if (values.empty()) fail(ErrorCode::EmptySubset, "subset '" + name + "' has no entries");

    std::vector<double> mass(bins, 0.0);
    if (opts.method == DensityMethod::Histogram) {
      for (double x : values) {
        if (x < lo || x > hi) continue;
        auto b = static_cast<std::size_t>(std::floor((x - lo) / width));
        if (b >= bins) b = bins - 1;  // x == hi lands in the last bin
        mass[b] += 1.0;
      }
    } else {
      double h = detail::silverman_bandwidth(values);
      if (!(h > 0.0)) h = width;
      const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * h);
      for (std::size_t b = 0; b < bins; ++b) {
        const double c = lo + (static_cast<double>(b) + 0.5) * width;
        for (double x : values) {
          const double z = (c - x) / h;
          mass[b] += norm * std::exp(-0.5 * z * z);
        }
      }
    }
    double total = 0.0;
    for (double m : mass) total += m;
    if (!(total > 0.0)) fail(ErrorCode::EmptySubset, "subset '" + name + "' has no mass inside the range");

    SubsetDensity d{name, {}};
    d.bins.reserve(bins);
    for (std::size_t b = 0; b < bins; ++b)
      d.bins.push_back({lo + (static_cast<double>(b) + 0.5) * width, mass[b] / (total * width)});
    st.densities.push_back(std::move(d));
  }
  return st;
}

inline void write_density_csv(std::ostream& out, const SplitStats& st) {
  out << "subset,bin_center,density\n";
  for (const auto& d : st.densities)
    for (const auto& b : d.bins)
      out << csv::quote(d.subset) << ',' << csv::format_double(b.center) << ','
          << csv::format_double(b.density) << '\n';
}

inline void write_counts_csv(std::ostream& out, const SplitStats& st) {
  out << "split,count,exclusive\n";
  for (const auto& [s, c] : st.counts) out << to_string(s) << ',' << c << ',' << st.exclusive_counts.at(s) << '\n';
}

}  // namespace uhdiqa
