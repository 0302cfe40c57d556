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
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "uhdiqa/csv.hpp"
#include "uhdiqa/dataset.hpp"
#include "uhdiqa/error.hpp"

namespace uhdiqa {

/// Predicted scores p and ground-truth MOS q, paired by image id.
struct PredictionSet {
  std::vector<std::string> ids;
  std::vector<double> predicted;
  std::vector<double> truth;

  std::size_t size() const noexcept { return predicted.size(); }

  /// Builds a set with generated ids ("0", "1", ...).
  static PredictionSet from_vectors(std::vector<double> p, std::vector<double> q) {
    PredictionSet ps;
    ps.ids.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) ps.ids.push_back(std::to_string(i));
    ps.predicted = std::move(p);
    ps.truth = std::move(q);
    ps.validate(1);
    return ps;
  }

  void validate(std::size_t min_size) const {
    if (predicted.size() != truth.size() || ids.size() != predicted.size())
      fail(ErrorCode::LengthMismatch, "ids, predicted and truth must have equal lengths");
    if (predicted.size() < min_size)
      fail(ErrorCode::InvalidInput, "need at least " + std::to_string(min_size) + " predictions");
    for (std::size_t i = 0; i < predicted.size(); ++i)
      if (!std::isfinite(predicted[i]) || !std::isfinite(truth[i]))
        fail(ErrorCode::InvalidInput, "non-finite value at '" + ids[i] + "'");
    std::unordered_set<std::string_view> seen;
    for (const auto& id : ids)
      if (!seen.insert(id).second) fail(ErrorCode::InvalidInput, "duplicate id '" + id + "'");
  }
};

struct MetricReport {
  double mae = 0.0;
  double rmse = 0.0;
  double plcc = 0.0;
  double srcc = 0.0;
  double krcc = 0.0;
};

// ---------------------------------------------------------------------------
// Primitive routines over raw vectors

namespace stats {

/// Plain left-to-right sum up to 1024 terms, pairwise recursion beyond.
inline double sum(std::span<const double> v) {
  if (v.size() <= 1024) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return sum(v.first(half)) + sum(v.subspan(half));
}

inline double mean(std::span<const double> v) { return sum(v) / static_cast<double>(v.size()); }

inline void check_pair(std::span<const double> a, std::span<const double> b, std::size_t min_size) {
  if (a.size() != b.size()) fail(ErrorCode::LengthMismatch, "vectors differ in length");
  if (a.size() < min_size) fail(ErrorCode::InvalidInput, "need at least " + std::to_string(min_size) + " values");
}

inline double mae(std::span<const double> p, std::span<const double> q) {
  check_pair(p, q, 1);
  std::vector<double> t(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) t[i] = std::abs(p[i] - q[i]);
  return mean(t);
}

inline double rmse(std::span<const double> p, std::span<const double> q) {
  check_pair(p, q, 1);
  std::vector<double> t(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) t[i] = (p[i] - q[i]) * (p[i] - q[i]);
  return std::sqrt(mean(t));
}

/// Sample Pearson correlation via centred sums.
inline double pearson(std::span<const double> p, std::span<const double> q) {
  check_pair(p, q, 2);
  const double mp = mean(p), mq = mean(q);
  const std::size_t n = p.size();
  std::vector<double> xy(n), xx(n), yy(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dp = p[i] - mp, dq = q[i] - mq;
    xy[i] = dp * dq;
    xx[i] = dp * dp;
    yy[i] = dq * dq;
  }
  const double sxx = sum(xx), syy = sum(yy);
  if (!(sxx > 0.0) || !(syy > 0.0)) fail(ErrorCode::ZeroVariance, "a vector has zero variance");
  const double r = sum(xy) / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

/// 1-based fractional ranks: tied values share the mean of the ranks they span.
inline std::vector<double> fractional_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && v[order[j]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + 1 + j);  // mean of i+1 .. j
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

inline double spearman(std::span<const double> p, std::span<const double> q) {
  check_pair(p, q, 2);
  const auto rp = fractional_ranks(p), rq = fractional_ranks(q);
  return pearson(rp, rq);
}

/// Pair counts behind Kendall's tau-b. `joint_ties` counts pairs tied in both.
struct KendallCounts {
  std::int64_t pairs = 0;
  std::int64_t concordant_minus_discordant = 0;
  std::int64_t ties_p = 0;
  std::int64_t ties_q = 0;
};

namespace detail {

inline std::int64_t tie_pairs(std::span<const double> sorted) {
  std::int64_t t = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const auto g = static_cast<std::int64_t>(j - i);
    t += g * (g - 1) / 2;
    i = j;
  }
  return t;
}

// Merge sort on `v`, returning the number of strictly inverted pairs.
inline std::int64_t count_inversions(std::vector<double>& v, std::vector<double>& buf, std::size_t lo,
                                     std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t inv = count_inversions(v, buf, lo, mid) + count_inversions(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      inv += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

}  // namespace detail

/// O(n log n) pair counting (Knight's method): lexicographic sort by (p, q),
/// then inversions of the q sequence are the discordant pairs.
inline KendallCounts kendall_counts(std::span<const double> p, std::span<const double> q) {
  check_pair(p, q, 2);
  const std::size_t n = p.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return p[a] < p[b] || (p[a] == p[b] && q[a] < q[b]);
  });

  std::vector<double> ps(n), qs(n);
  for (std::size_t i = 0; i < n; ++i) {
    ps[i] = p[order[i]];
    qs[i] = q[order[i]];
  }

  KendallCounts c;
  c.pairs = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  c.ties_p = detail::tie_pairs(ps);
  std::int64_t joint = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && ps[j] == ps[i] && qs[j] == qs[i]) ++j;
    const auto g = static_cast<std::int64_t>(j - i);
    joint += g * (g - 1) / 2;
    i = j;
  }

  std::vector<double> buf(n);
  const std::int64_t discordant = detail::count_inversions(qs, buf, 0, n);
  c.ties_q = detail::tie_pairs(qs);  // qs is sorted now
  c.concordant_minus_discordant = c.pairs - c.ties_p - c.ties_q + joint - 2 * discordant;
  return c;
}

/// Kendall tau-b, evaluated as
/// double(C - D) / sqrt(double(n0 - n1) * double(n0 - n2)).
inline double tau_b(const KendallCounts& c) {
  const std::int64_t dp = c.pairs - c.ties_p, dq = c.pairs - c.ties_q;
  if (dp == 0 || dq == 0) fail(ErrorCode::ZeroVariance, "a vector is entirely tied");
  return static_cast<double>(c.concordant_minus_discordant) /
         std::sqrt(static_cast<double>(dp) * static_cast<double>(dq));
}

inline double kendall(std::span<const double> p, std::span<const double> q) {
  return tau_b(kendall_counts(p, q));
}

}  // namespace stats

// ---------------------------------------------------------------------------
// PredictionSet API

inline double mae(const PredictionSet& ps) {
  ps.validate(1);
  return stats::mae(ps.predicted, ps.truth);
}

inline double rmse(const PredictionSet& ps) {
  ps.validate(1);
  return stats::rmse(ps.predicted, ps.truth);
}

inline double plcc(const PredictionSet& ps) {
  ps.validate(2);
  return stats::pearson(ps.predicted, ps.truth);
}

inline double srcc(const PredictionSet& ps) {
  ps.validate(2);
  return stats::spearman(ps.predicted, ps.truth);
}

inline double krcc(const PredictionSet& ps) {
  ps.validate(2);
  return stats::kendall(ps.predicted, ps.truth);
}

inline MetricReport evaluate(const PredictionSet& ps) {
  ps.validate(2);
  return {stats::mae(ps.predicted, ps.truth), stats::rmse(ps.predicted, ps.truth),
          stats::pearson(ps.predicted, ps.truth), stats::spearman(ps.predicted, ps.truth),
          stats::kendall(ps.predicted, ps.truth)};
}

struct Poly2 {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0;

  double operator()(double x) const noexcept { return a0 + (a1 + a2 * x) * x; }
};

/// Least-squares p ~ a0 + a1 q + a2 q^2, solved by column-pivoted QR on the
/// Vandermonde design.
inline Poly2 poly2_fit(const PredictionSet& ps) {
  ps.validate(3);
  std::vector<double> xs = ps.truth;
  std::sort(xs.begin(), xs.end());
  if (std::unique(xs.begin(), xs.end()) - xs.begin() < 3)
    fail(ErrorCode::SingularDesign, "need at least 3 distinct ground-truth values");

  const auto n = static_cast<Eigen::Index>(ps.size());
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double q = ps.truth[static_cast<std::size_t>(i)];
    A(i, 0) = 1.0;
    A(i, 1) = q;
    A(i, 2) = q * q;
    b(i) = ps.predicted[static_cast<std::size_t>(i)];
  }
  const auto qr = A.colPivHouseholderQr();
  if (qr.rank() < 3) fail(ErrorCode::SingularDesign, "design matrix is rank deficient");
  const Eigen::Vector3d c = qr.solve(b);
  return {c(0), c(1), c(2)};
}

// ---------------------------------------------------------------------------
// Prediction files

/// Reads `image_id,score` rows.
inline std::vector<std::pair<std::string, double>> read_predictions(std::istream& in) {
  const auto t = csv::read(in);
  const auto cid = t.column("image_id"), cs = t.column("score");
  if (cid < 0 || cs < 0) fail(ErrorCode::MissingColumn, "predictions need columns image_id,score");
  std::vector<std::pair<std::string, double>> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const double s = csv::parse_double(row[static_cast<std::size_t>(cs)], "row " + std::to_string(t.line_numbers[r]));
    if (!std::isfinite(s))
      fail(ErrorCode::InvalidInput, "row " + std::to_string(t.line_numbers[r]) + ": score is not finite");
    out.emplace_back(row[static_cast<std::size_t>(cid)], s);
  }
  return out;
}

inline std::vector<std::pair<std::string, double>> read_predictions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open predictions " + path);
  return read_predictions(in);
}

/// Pairs predictions with manifest MOS. Both directions must match exactly:
/// ids missing from `entries` and entries without a prediction are reported
/// together. The result follows manifest order.
inline PredictionSet join_predictions(const std::vector<ManifestEntry>& entries,
                                      const std::vector<std::pair<std::string, double>>& predictions) {
  std::unordered_map<std::string, double> by_id;
  std::vector<std::string> duplicate;
  for (const auto& [id, s] : predictions)
    if (!by_id.emplace(id, s).second) duplicate.push_back(id);
  if (!duplicate.empty()) {
    std::string msg = "duplicate prediction ids:";
    for (const auto& d : duplicate) msg += " " + d;
    fail(ErrorCode::InvalidInput, msg);
  }

  std::unordered_set<std::string_view> manifest_ids;
  std::vector<std::string> missing, unknown;
  PredictionSet ps;
  for (const auto& e : entries) {
    manifest_ids.insert(e.image_id);
    auto it = by_id.find(e.image_id);
    if (it == by_id.end()) {
      missing.push_back(e.image_id);
      continue;
    }
    ps.ids.push_back(e.image_id);
    ps.predicted.push_back(it->second);
    ps.truth.push_back(e.mos);
  }
  for (const auto& [id, _] : predictions)
    if (!manifest_ids.contains(id)) unknown.push_back(id);
  if (!missing.empty() || !unknown.empty()) {
    std::sort(unknown.begin(), unknown.end());
    std::string msg;
    if (!missing.empty()) {
      msg += "no prediction for:";
      for (const auto& m : missing) msg += " " + m;
    }
    if (!unknown.empty()) {
      if (!msg.empty()) msg += "; ";
      msg += "not in manifest split:";
      for (const auto& u : unknown) msg += " " + u;
    }
    fail(ErrorCode::UnmatchedIds, msg);
  }
  return ps;
}

inline nlohmann::json to_json(const MetricReport& r) {
  return {{"mae", r.mae}, {"rmse", r.rmse}, {"plcc", r.plcc}, {"srcc", r.srcc}, {"krcc", r.krcc}};
}

inline void write_report_csv(std::ostream& out, const MetricReport& r, std::size_t n) {
  out << "n,mae,rmse,plcc,srcc,krcc\n"
      << n << ',' << csv::format_double(r.mae) << ',' << csv::format_double(r.rmse) << ','
      << csv::format_double(r.plcc) << ',' << csv::format_double(r.srcc) << ',' << csv::format_double(r.krcc)
      << '\n';
}

}  // namespace uhdiqa
