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
#include <iomanip>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "uhdiqa/csv.hpp"
#include "uhdiqa/error.hpp"
#include "uhdiqa/metrics.hpp"

namespace uhdiqa {

enum class Direction { LowerBetter, HigherBetter };

/// Rank 1 is the best value; exact ties share the mean of the ranks they span.
inline std::vector<double> rank_metric(std::span<const double> values, Direction direction) {
  if (values.empty()) fail(ErrorCode::InvalidInput, "nothing to rank");
  std::vector<double> keyed(values.begin(), values.end());
  for (double v : keyed)
    if (!std::isfinite(v)) fail(ErrorCode::InvalidInput, "metric values must be finite");
  if (direction == Direction::HigherBetter)
    for (double& v : keyed) v = -v;
  return stats::fractional_ranks(keyed);
}

struct Submission {
  std::string team;
  MetricReport report;
};

/// Metric order used in leaderboard columns.
enum MetricIndex { kMae = 0, kRmse, kPlcc, kSrcc, kKrcc, kMetricCount };

inline constexpr std::array<const char*, kMetricCount> kMetricNames = {"mae", "rmse", "plcc", "srcc", "krcc"};
inline constexpr std::array<Direction, kMetricCount> kMetricDirections = {
    Direction::LowerBetter, Direction::LowerBetter, Direction::HigherBetter, Direction::HigherBetter,
    Direction::HigherBetter};

inline double metric_value(const MetricReport& r, int k) {
  switch (k) {
    case kMae: return r.mae;
    case kRmse: return r.rmse;
    case kPlcc: return r.plcc;
    case kSrcc: return r.srcc;
    default: return r.krcc;
  }
}

struct LeaderboardRow {
  std::string team;
  MetricReport report;
  std::array<double, kMetricCount> ranks{};
  double score = 0.0;
  bool tied = false;  // shares its score with another team
};

struct Leaderboard {
  std::vector<LeaderboardRow> rows;  // ascending score
};

/// Main score: the mean of a team's five per-metric ranks; lowest wins.
/// Equal scores are ordered by team name and flagged.
inline Leaderboard challenge_score(const std::vector<Submission>& submissions) {
  if (submissions.size() < 2) fail(ErrorCode::InvalidInput, "ranking needs at least 2 submissions");
  std::set<std::string> names;
  for (const auto& s : submissions)
    if (!names.insert(s.team).second) fail(ErrorCode::DuplicateTeam, "team '" + s.team + "' appears twice");

  const std::size_t n = submissions.size();
  Leaderboard lb;
  lb.rows.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    lb.rows[i].team = submissions[i].team;
    lb.rows[i].report = submissions[i].report;
  }
  for (int k = 0; k < kMetricCount; ++k) {
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = metric_value(submissions[i].report, k);
    const auto ranks = rank_metric(values, kMetricDirections[static_cast<std::size_t>(k)]);
    for (std::size_t i = 0; i < n; ++i) lb.rows[i].ranks[static_cast<std::size_t>(k)] = ranks[i];
  }
  for (auto& row : lb.rows) {
    double s = 0.0;
    for (double r : row.ranks) s += r;
    row.score = s / static_cast<double>(kMetricCount);
  }
  std::sort(lb.rows.begin(), lb.rows.end(), [](const LeaderboardRow& a, const LeaderboardRow& b) {
    return a.score < b.score || (a.score == b.score && a.team < b.team);
  });
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (lb.rows[i].score == lb.rows[i + 1].score) lb.rows[i].tied = lb.rows[i + 1].tied = true;
  return lb;
}

inline void write_leaderboard_csv(std::ostream& out, const Leaderboard& lb) {
  out << "team,rank_mae,rank_rmse,rank_plcc,rank_srcc,rank_krcc,score\n";
  for (const auto& r : lb.rows) {
    out << csv::quote(r.team);
    for (double v : r.ranks) out << ',' << csv::format_double(v);
    out << ',' << csv::format_double(r.score) << '\n';
  }
}

inline void write_leaderboard_text(std::ostream& out, const Leaderboard& lb) {
  std::size_t width = 4;
  for (const auto& r : lb.rows) width = std::max(width, r.team.size());
  std::ostringstream s;
  s << std::left << std::setw(4) << "#" << std::setw(static_cast<int>(width) + 2) << "team" << std::right;
  for (const char* m : {"MAE", "RMSE", "PLCC", "SRCC", "KRCC"}) s << std::setw(9) << m;
  s << std::setw(8) << "S" << '\n';
  std::size_t pos = 1;
  for (const auto& r : lb.rows) {
    s << std::left << std::setw(4) << pos++ << std::setw(static_cast<int>(width) + 2) << r.team << std::right
      << std::fixed;
    for (int k = 0; k < kMetricCount; ++k)
      s << std::setw(9) << std::setprecision(4) << metric_value(r.report, k);
    s << std::setw(8) << std::setprecision(2) << r.score << (r.tied ? "  (tie)" : "") << '\n';
  }
  out << s.str();
}

/// Reads `team,mae,rmse,plcc,srcc,krcc` rows of already-computed metrics.
inline std::vector<Submission> read_reports(std::istream& in) {
  const auto t = csv::read(in);
  const auto ct = t.column("team");
  if (ct < 0) fail(ErrorCode::MissingColumn, "reports need a 'team' column");
  std::array<std::ptrdiff_t, kMetricCount> cols{};
  for (int k = 0; k < kMetricCount; ++k) {
    cols[static_cast<std::size_t>(k)] = t.column(kMetricNames[static_cast<std::size_t>(k)]);
    if (cols[static_cast<std::size_t>(k)] < 0)
      fail(ErrorCode::MissingColumn, std::string("reports need a '") + kMetricNames[static_cast<std::size_t>(k)] + "' column");
  }
  std::vector<Submission> subs;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string where = "row " + std::to_string(t.line_numbers[r]);
    auto get = [&](int k) { return csv::parse_double(row[static_cast<std::size_t>(cols[static_cast<std::size_t>(k)])], where); };
    subs.push_back({row[static_cast<std::size_t>(ct)], {get(kMae), get(kRmse), get(kPlcc), get(kSrcc), get(kKrcc)}});
  }
  return subs;
}

inline void write_reports_csv(std::ostream& out, const std::vector<Submission>& subs) {
  out << "team,mae,rmse,plcc,srcc,krcc\n";
  for (const auto& s : subs) {
    out << csv::quote(s.team);
    for (int k = 0; k < kMetricCount; ++k) out << ',' << csv::format_double(metric_value(s.report, k));
    out << '\n';
  }
}

}  // namespace uhdiqa
