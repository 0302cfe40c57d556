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

// Batch commands behind the `uhdiqa` tool. Each command reads its inputs,
// writes its artifacts under RunConfig::out_dir and returns the data it
// wrote, so the same code paths are exercised in-process by the tests.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uhdiqa/budget.hpp"
#include "uhdiqa/dataset.hpp"
#include "uhdiqa/error.hpp"
#include "uhdiqa/features.hpp"
#include "uhdiqa/image_io.hpp"
#include "uhdiqa/metrics.hpp"
#include "uhdiqa/parallel.hpp"
#include "uhdiqa/predictor.hpp"
#include "uhdiqa/ranking.hpp"
#include "uhdiqa/rng.hpp"
#include "uhdiqa/svg.hpp"
#include "uhdiqa/views.hpp"

namespace uhdiqa::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitBudgetFail = 2;

enum class Format { Csv, Json, Text };

inline Format parse_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  if (s == "text") return Format::Text;
  fail(ErrorCode::InvalidInput, "unknown format '" + s + "'");
}

/// Seed used when neither --seed nor UHDIQA_SEED is given.
inline constexpr std::uint64_t kDefaultSeed = 0;

inline std::uint64_t seed_from_env() {
  if (const char* s = std::getenv("UHDIQA_SEED")) {
    char* end = nullptr;
    const auto v = std::strtoull(s, &end, 10);
    if (*s && end && *end == '\0') return v;
    fail(ErrorCode::InvalidInput, std::string("UHDIQA_SEED is not an unsigned integer: '") + s + "'");
  }
  return kDefaultSeed;
}

struct RunConfig {
  std::uint64_t seed = kDefaultSeed;
  fs::path out_dir = ".";
  Format format = Format::Csv;
  unsigned threads = 1;
  std::ostream* log = &std::cout;
};

namespace detail {

inline void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) fail(ErrorCode::InvalidInput, "cannot create " + p.string() + ": " + ec.message());
}

inline std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorCode::InvalidInput, "cannot write " + p.string());
  return out;
}

inline nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + p.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, p.string() + ": " + e.what());
  }
}

// Entries of one split, optionally restricted to its exclusive slice.
inline std::vector<ManifestEntry> select(const std::vector<ManifestEntry>& all, Split split, bool exclusive_only) {
  return exclusive_only ? filter_exclusive(all, split) : filter_split(all, split);
}

// Join against the whole split first so ids outside the exclusive slice are
// not reported as unknown, then narrow.
inline PredictionSet joined_slice(const std::vector<ManifestEntry>& manifest, const fs::path& predictions,
                                  Split split, bool exclusive_only) {
  const auto preds = read_predictions_file(predictions.string());
  PredictionSet full = join_predictions(filter_split(manifest, split), preds);
  if (!exclusive_only) return full;
  std::set<std::string> keep;
  for (const auto& e : filter_exclusive(manifest, split)) keep.insert(e.image_id);
  PredictionSet out;
  for (std::size_t i = 0; i < full.size(); ++i)
    if (keep.contains(full.ids[i])) {
      out.ids.push_back(full.ids[i]);
      out.predicted.push_back(full.predicted[i]);
      out.truth.push_back(full.truth[i]);
    }
  return out;
}

inline std::string report_text(const MetricReport& r, std::size_t n) {
  std::ostringstream s;
  s << "n=" << n << "  MAE=" << csv::format_double(r.mae) << "  RMSE=" << csv::format_double(r.rmse)
    << "  PLCC=" << csv::format_double(r.plcc) << "  SRCC=" << csv::format_double(r.srcc)
    << "  KRCC=" << csv::format_double(r.krcc) << '\n';
  return s.str();
}

}  // namespace detail

/// Seed root for one image: derive_seed(seed, {hash("image"), hash(id)}).
inline std::uint64_t image_seed(std::uint64_t seed, std::string_view image_id) {
  return derive_seed(seed, {hash_name("image"), hash_name(image_id)});
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  fs::path manifest;
  fs::path predictions;
  Split split = Split::Test;
  bool exclusive_only = false;
};

struct EvaluateResult {
  MetricReport report;
  std::size_t n = 0;
  fs::path written;
};

inline EvaluateResult cmd_evaluate(const EvaluateArgs& a, const RunConfig& cfg) {
  const auto manifest = load_manifest(a.manifest);
  const auto ps = detail::joined_slice(manifest, a.predictions, a.split, a.exclusive_only);
  EvaluateResult res{evaluate(ps), ps.size(), {}};

  detail::ensure_dir(cfg.out_dir);
  switch (cfg.format) {
    case Format::Csv: {
      res.written = cfg.out_dir / "metrics.csv";
      auto out = detail::open_out(res.written);
      write_report_csv(out, res.report, res.n);
      break;
    }
    case Format::Json: {
      res.written = cfg.out_dir / "metrics.json";
      auto j = to_json(res.report);
      j["n"] = res.n;
      j["split"] = std::string(to_string(a.split));
      j["exclusive_only"] = a.exclusive_only;
      detail::open_out(res.written) << j.dump(2) << '\n';
      break;
    }
    case Format::Text: {
      res.written = cfg.out_dir / "metrics.txt";
      detail::open_out(res.written) << detail::report_text(res.report, res.n);
      break;
    }
  }
  *cfg.log << detail::report_text(res.report, res.n);
  return res;
}

// ---------------------------------------------------------------------------
// rank

struct RankArgs {
  fs::path manifest;
  fs::path submissions_dir;   // one `<team>.csv` prediction file per team
  fs::path reports;           // alternatively: precomputed metrics per team
  Split split = Split::Test;
  bool exclusive_only = false;
  bool include_baseline = false;
  std::string baseline_name = "baseline";
};

inline Leaderboard cmd_rank(const RankArgs& a, const RunConfig& cfg) {
  std::vector<Submission> subs;
  if (!a.reports.empty()) {
    std::ifstream in(a.reports);
    if (!in) fail(ErrorCode::ParseError, "cannot open " + a.reports.string());
    subs = read_reports(in);
  } else {
    if (a.submissions_dir.empty() || !fs::is_directory(a.submissions_dir))
      fail(ErrorCode::InvalidInput, "submissions directory not found: " + a.submissions_dir.string());
    const auto manifest = load_manifest(a.manifest);
    std::vector<fs::path> files;
    for (const auto& de : fs::directory_iterator(a.submissions_dir))
      if (de.is_regular_file() && (de.path().extension() == ".csv" || de.path().extension() == ".txt"))
        files.push_back(de.path());
    std::sort(files.begin(), files.end());
    std::set<std::string> teams;
    for (const auto& f : files)
      if (!teams.insert(f.stem().string()).second)
        fail(ErrorCode::DuplicateTeam, "team '" + f.stem().string() + "' has more than one submission file");
    subs.resize(files.size());
    parallel_for(files.size(), cfg.threads, [&](std::size_t i) {
      try {
        subs[i] = {files[i].stem().string(),
                   evaluate(detail::joined_slice(manifest, files[i], a.split, a.exclusive_only))};
      } catch (const Error& e) {
        throw Error(e.code(), files[i].filename().string() + ": " + e.what());
      }
    });
  }

  std::vector<Submission> ranked;
  for (const auto& s : subs)
    if (a.include_baseline || s.team != a.baseline_name) ranked.push_back(s);
  const Leaderboard lb = challenge_score(ranked);

  detail::ensure_dir(cfg.out_dir);
  {
    auto out = detail::open_out(cfg.out_dir / "reports.csv");
    write_reports_csv(out, subs);
  }
  {
    auto out = detail::open_out(cfg.out_dir / "leaderboard.csv");
    write_leaderboard_csv(out, lb);
  }
  std::ostringstream text;
  write_leaderboard_text(text, lb);
  detail::open_out(cfg.out_dir / "leaderboard.txt") << text.str();
  *cfg.log << text.str();
  return lb;
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
  fs::path manifest;
  fs::path predictions;
  Split split = Split::Test;
  bool exclusive_only = false;
  std::size_t bins = 20;
  std::size_t curve_samples = 101;
  bool svg = false;
};

struct ReportResult {
  Poly2 fit;
  std::vector<std::pair<double, double>> curve;
  SplitStats density;
};

inline ReportResult cmd_report(const ReportArgs& a, const RunConfig& cfg) {
  if (a.curve_samples < 2) fail(ErrorCode::InvalidInput, "curve_samples must be >= 2");
  const auto manifest = load_manifest(a.manifest);
  const auto ps = detail::joined_slice(manifest, a.predictions, a.split, a.exclusive_only);

  ReportResult res;
  res.fit = poly2_fit(ps);
  const auto [qmin, qmax] = std::minmax_element(ps.truth.begin(), ps.truth.end());
  for (std::size_t i = 0; i < a.curve_samples; ++i) {
    const double x = *qmin + (*qmax - *qmin) * static_cast<double>(i) / static_cast<double>(a.curve_samples - 1);
    res.curve.emplace_back(x, res.fit(x));
  }

  const auto slice = detail::select(manifest, a.split, a.exclusive_only);
  StatsOptions so;
  so.subsets = {"overall"};
  if (std::any_of(slice.begin(), slice.end(), [](const auto& e) { return e.exclusive; }) && !a.exclusive_only)
    so.subsets.push_back("exclusive");
  res.density = split_stats(slice, a.bins, so);

  detail::ensure_dir(cfg.out_dir);
  {
    auto out = detail::open_out(cfg.out_dir / "points.csv");
    out << "image_id,mos,predicted\n";
    for (std::size_t i = 0; i < ps.size(); ++i)
      out << csv::quote(ps.ids[i]) << ',' << csv::format_double(ps.truth[i]) << ','
          << csv::format_double(ps.predicted[i]) << '\n';
  }
  detail::open_out(cfg.out_dir / "poly2.csv") << "a0,a1,a2\n"
                                              << csv::format_double(res.fit.a0) << ','
                                              << csv::format_double(res.fit.a1) << ','
                                              << csv::format_double(res.fit.a2) << '\n';
  {
    auto out = detail::open_out(cfg.out_dir / "curve.csv");
    out << "mos,fitted\n";
    for (const auto& [x, y] : res.curve) out << csv::format_double(x) << ',' << csv::format_double(y) << '\n';
  }
  {
    auto out = detail::open_out(cfg.out_dir / "density.csv");
    write_density_csv(out, res.density);
  }
  if (a.svg) {
    svg::Plot scatter{"predicted vs MOS", "MOS", "predicted", {}, {res.curve}};
    for (std::size_t i = 0; i < ps.size(); ++i) scatter.points.emplace_back(ps.truth[i], ps.predicted[i]);
    auto s = detail::open_out(cfg.out_dir / "scatter.svg");
    svg::write(s, scatter);
    svg::Plot dens{"MOS density", "MOS", "density", {}, {}};
    for (const auto& d : res.density.densities) {
      std::vector<std::pair<double, double>> line;
      for (const auto& b : d.bins) line.emplace_back(b.center, b.density);
      dens.lines.push_back(std::move(line));
    }
    auto d = detail::open_out(cfg.out_dir / "density.svg");
    svg::write(d, dens);
  }
  *cfg.log << "poly2: a0=" << csv::format_double(res.fit.a0) << " a1=" << csv::format_double(res.fit.a1)
           << " a2=" << csv::format_double(res.fit.a2) << '\n';
  return res;
}

// ---------------------------------------------------------------------------
// sample

struct SampleArgs {
  fs::path images_dir;
  fs::path viewset;
  /// Use the seeds written in the view set verbatim instead of per-image
  /// streams derived from --seed.
  bool raw_seeds = false;
};

struct SampleResult {
  std::vector<fs::path> written;
  std::vector<std::string> errors;
};

inline std::vector<fs::path> list_images(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorCode::InvalidInput, "image directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& de : fs::directory_iterator(dir))
    if (de.is_regular_file() && io::is_image_file(de.path())) files.push_back(de.path());
  std::sort(files.begin(), files.end());
  return files;
}

/// Writes `{id}__{view_index}.png` for every (image, view). Per-image
/// failures are collected rather than aborting the batch.
inline SampleResult cmd_sample(const SampleArgs& a, const RunConfig& cfg) {
  const ViewSet set = view_set_from_json(detail::read_json(a.viewset));
  const auto files = list_images(a.images_dir);
  detail::ensure_dir(cfg.out_dir);

  std::vector<std::vector<fs::path>> written(files.size());
  std::vector<std::string> errors(files.size());
  parallel_for(files.size(), cfg.threads, [&](std::size_t i) {
    const std::string id = files[i].stem().string();
    try {
      const Image img = io::read_image(files[i]);
      const ViewSet vs = a.raw_seeds ? set : reseed(set, image_seed(cfg.seed, id));
      const auto views = materialize_view_set(img, vs);
      for (std::size_t k = 0; k < views.size(); ++k) {
        const fs::path p = cfg.out_dir / (id + "__" + std::to_string(k) + ".png");
        io::write_png(p, views[k]);
        written[i].push_back(p);
      }
    } catch (const std::exception& e) {
      errors[i] = files[i].filename().string() + ": " + e.what();
    }
  });

  SampleResult res;
  for (std::size_t i = 0; i < files.size(); ++i) {
    res.written.insert(res.written.end(), written[i].begin(), written[i].end());
    if (!errors[i].empty()) res.errors.push_back(errors[i]);
  }
  for (const auto& e : res.errors) *cfg.log << "error: " << e << '\n';
  *cfg.log << "wrote " << res.written.size() << " views from " << files.size() << " images\n";
  return res;
}

// ---------------------------------------------------------------------------
// macs

struct MacsArgs {
  fs::path graph;
  double budget_gmacs = 50.0;
  bool strict = false;
};

inline BudgetReport cmd_macs(const MacsArgs& a, const RunConfig& cfg) {
  const ModelGraph g = graph_from_json(detail::read_json(a.graph));
  const BudgetReport rep = graph_macs(g, gmacs_to_macs(a.budget_gmacs), a.strict);
  std::ostringstream text;
  write_budget_text(text, rep);
  if (cfg.format == Format::Json) *cfg.log << to_json(rep).dump(2) << '\n';
  else *cfg.log << text.str();
  detail::ensure_dir(cfg.out_dir);
  detail::open_out(cfg.out_dir / "macs.json") << to_json(rep).dump(2) << '\n';
  detail::open_out(cfg.out_dir / "macs.txt") << text.str();
  return rep;
}

// ---------------------------------------------------------------------------
// features for fit / predict

/// Features of each entry's image, single sample: the view set is reseeded
/// with derive_seed(image_seed(seed, id), {0}), matching sample 0 of
/// multi_sample_predict.
inline FeatureTable compute_features(const std::vector<ManifestEntry>& entries, const ViewSet& set,
                                     std::uint64_t seed, unsigned threads) {
  FeatureTable t;
  t.names = feature_names(set);
  t.values.resize(static_cast<Eigen::Index>(entries.size()), static_cast<Eigen::Index>(t.names.size()));
  for (const auto& e : entries) t.ids.push_back(e.image_id);
  parallel_for(entries.size(), threads, [&](std::size_t i) {
    try {
      const Image img = io::read_image(entries[i].path);
      const auto fv = extract_features(img, reseed(set, derive_seed(image_seed(seed, entries[i].image_id), {0})));
      for (std::size_t c = 0; c < fv.values.size(); ++c)
        t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = fv.values[c];
    } catch (const Error& err) {
      throw Error(err.code(), entries[i].image_id + ": " + err.what());
    }
  });
  return t;
}

namespace detail {

// Rows of `table` reordered to follow `entries`; every entry must be present.
inline FeatureTable align(const FeatureTable& table, const std::vector<ManifestEntry>& entries) {
  std::unordered_map<std::string, Eigen::Index> idx;
  for (std::size_t r = 0; r < table.ids.size(); ++r) idx.emplace(table.ids[r], static_cast<Eigen::Index>(r));
  FeatureTable out;
  out.names = table.names;
  out.values.resize(static_cast<Eigen::Index>(entries.size()), table.values.cols());
  std::string missing;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto it = idx.find(entries[i].image_id);
    if (it == idx.end()) {
      missing += " " + entries[i].image_id;
      continue;
    }
    out.ids.push_back(entries[i].image_id);
    out.values.row(static_cast<Eigen::Index>(i)) = table.values.row(it->second);
  }
  if (!missing.empty()) fail(ErrorCode::UnmatchedIds, "no feature row for:" + missing);
  return out;
}

inline std::vector<double> mos_of(const std::vector<ManifestEntry>& entries) {
  std::vector<double> y;
  for (const auto& e : entries) y.push_back(e.mos);
  return y;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
  fs::path manifest;
  Split split = Split::Train;
  fs::path features;     // precomputed feature table; otherwise computed
  fs::path viewset;      // view set JSON for on-the-fly features
  bool ensemble = false;
  double split_fraction = kDefaultSplitFraction;
  std::vector<double> alpha_grid = default_alpha_grid();
  fs::path teacher;      // optional: pseudo-label the unlabeled split with it
  Split unlabeled_split = Split::Validation;
  double pseudo_weight = 1.0;
  fs::path model_out = "model.json";
};

struct FitResult {
  ModelFile model;
  double alpha = 0.0;
  fs::path written;
};

inline FitResult cmd_fit(const FitArgs& a, const RunConfig& cfg) {
  const auto manifest = load_manifest(a.manifest);
  const auto train = filter_split(manifest, a.split);
  if (train.size() < 3) fail(ErrorCode::TooFewRows, "split '" + std::string(to_string(a.split)) + "' has too few rows");

  std::optional<ViewSet> views;
  std::optional<FeatureTable> all_features;
  auto features_for = [&](const std::vector<ManifestEntry>& entries) {
    if (all_features) return detail::align(*all_features, entries);
    return compute_features(entries, *views, cfg.seed, cfg.threads);
  };
  if (!a.features.empty()) {
    std::ifstream in(a.features);
    if (!in) fail(ErrorCode::ParseError, "cannot open " + a.features.string());
    all_features = read_feature_table(in);
  } else {
    if (a.viewset.empty()) fail(ErrorCode::InvalidInput, "fit needs --features or --viewset");
    views = view_set_from_json(detail::read_json(a.viewset));
  }

  const FeatureTable X = features_for(train);
  const auto y = detail::mos_of(train);
  const std::uint64_t fit_seed = derive_seed(cfg.seed, {hash_name("fit")});

  FitResult res;
  res.model.views = views;
  if (a.ensemble) {
    EnsembleOptions eo{a.alpha_grid, a.split_fraction, fit_seed, {}};
    auto ens = fit_group_ensemble(X, y, group_by_prefix(X.names), eo);
    res.alpha = ens.members.front().alpha;
    res.model.model.head = std::move(ens);
  } else {
    auto search = alpha_search(X.values, X.names, y, a.alpha_grid, a.split_fraction, fit_seed);
    res.alpha = search.alpha;
    res.model.model.head = std::move(search.model);
  }

  if (!a.teacher.empty()) {
    const ModelFile teacher = model_from_json(detail::read_json(a.teacher));
    const auto unlabeled_entries = filter_split(manifest, a.unlabeled_split);
    const FeatureTable U = features_for(unlabeled_entries);
    // A teacher with its own view set labels images through those views.
    const auto labels = teacher.views && !all_features
                            ? teacher.model(compute_features(unlabeled_entries, *teacher.views, cfg.seed, cfg.threads))
                            : teacher.model(U);
    res.model.model.head = pseudo_label_finetune(X, y, U, labels, res.alpha, {a.pseudo_weight, false});
  }

  const fs::path out = a.model_out.is_absolute() ? a.model_out : cfg.out_dir / a.model_out;
  detail::ensure_dir(out.parent_path().empty() ? fs::path(".") : out.parent_path());
  detail::open_out(out) << to_json(res.model).dump(2) << '\n';
  res.written = out;
  *cfg.log << "fit " << (a.ensemble ? "ensemble" : "ridge") << " on " << X.rows() << " rows, alpha "
           << csv::format_double(res.alpha) << " -> " << out.string() << '\n';
  return res;
}

// ---------------------------------------------------------------------------
// predict

struct PredictArgs {
  fs::path model;
  fs::path features;    // feature table; otherwise images from the manifest
  fs::path manifest;
  std::optional<Split> split;  // all manifest rows when unset
  std::size_t samples = 1;
  fs::path predictions_out = "predictions.csv";
};

inline std::vector<std::pair<std::string, double>> cmd_predict(const PredictArgs& a, const RunConfig& cfg) {
  const ModelFile mf = model_from_json(detail::read_json(a.model));
  std::vector<std::pair<std::string, double>> out;
  if (!a.features.empty()) {
    std::ifstream in(a.features);
    if (!in) fail(ErrorCode::ParseError, "cannot open " + a.features.string());
    const FeatureTable t = read_feature_table(in);
    const auto p = mf.model(t);
    for (std::size_t i = 0; i < p.size(); ++i) out.emplace_back(t.ids[i], p[i]);
  } else {
    if (!mf.views) fail(ErrorCode::InvalidInput, "model has no stored view set; pass --features");
    if (a.manifest.empty()) fail(ErrorCode::InvalidInput, "predict needs --features or --manifest");
    auto entries = load_manifest(a.manifest);
    if (a.split) entries = filter_split(entries, *a.split);
    std::vector<double> scores(entries.size());
    parallel_for(entries.size(), cfg.threads, [&](std::size_t i) {
      try {
        const Image img = io::read_image(entries[i].path);
        scores[i] = multi_sample_predict(mf.model, img, *mf.views, a.samples, image_seed(cfg.seed, entries[i].image_id));
      } catch (const Error& err) {
        throw Error(err.code(), entries[i].image_id + ": " + err.what());
      }
    });
    for (std::size_t i = 0; i < entries.size(); ++i) out.emplace_back(entries[i].image_id, scores[i]);
  }

  const fs::path dst = a.predictions_out.is_absolute() ? a.predictions_out : cfg.out_dir / a.predictions_out;
  detail::ensure_dir(dst.parent_path().empty() ? fs::path(".") : dst.parent_path());
  auto f = detail::open_out(dst);
  f << "image_id,score\n";
  for (const auto& [id, s] : out) f << csv::quote(id) << ',' << csv::format_double(s) << '\n';
  *cfg.log << "wrote " << out.size() << " predictions -> " << dst.string() << '\n';
  return out;
}

// ---------------------------------------------------------------------------
// stats

struct StatsArgs {
  fs::path manifest;
  std::size_t bins = 20;
  bool kde = false;
  std::vector<std::string> subsets{"overall", "exclusive"};
};

inline SplitStats cmd_stats(const StatsArgs& a, const RunConfig& cfg) {
  const auto manifest = load_manifest(a.manifest);
  StatsOptions so;
  so.subsets = a.subsets;
  so.method = a.kde ? DensityMethod::GaussianKde : DensityMethod::Histogram;
  const SplitStats st = split_stats(manifest, a.bins, so);
  detail::ensure_dir(cfg.out_dir);
  {
    auto out = detail::open_out(cfg.out_dir / "stats.csv");
    write_density_csv(out, st);
  }
  {
    auto out = detail::open_out(cfg.out_dir / "counts.csv");
    write_counts_csv(out, st);
  }
  write_counts_csv(*cfg.log, st);
  return st;
}

}  // namespace uhdiqa::cli
