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
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "uhdiqa/csv.hpp"
#include "uhdiqa/error.hpp"
#include "uhdiqa/features.hpp"
#include "uhdiqa/parallel.hpp"
#include "uhdiqa/rng.hpp"
#include "uhdiqa/views.hpp"

namespace uhdiqa {

/// Rows of named features, one per image.
struct FeatureTable {
  std::vector<std::string> ids;
  std::vector<std::string> names;
  Eigen::MatrixXd values;  // rows x names.size()

  Eigen::Index rows() const noexcept { return values.rows(); }

  FeatureVector row(Eigen::Index r) const {
    FeatureVector fv{names, std::vector<double>(names.size())};
    for (std::size_t c = 0; c < names.size(); ++c) fv.values[c] = values(r, static_cast<Eigen::Index>(c));
    return fv;
  }
};

// ---------------------------------------------------------------------------
// Ridge regression

struct RidgeModel {
  std::vector<std::string> feature_names;  // features actually used
  std::vector<double> means;
  std::vector<double> stds;
  std::vector<double> weights;  // on standardised features
  double bias = 0.0;
  double alpha = 1.0;
  std::vector<std::string> dropped_features;  // constant in the training data
  bool degenerate_targets = false;            // constant y: bias-only model
};

struct RidgeOptions {
  /// Per-row sample weights (empty: all 1). Zero-weight rows are dropped.
  std::vector<double> sample_weights;
};

/// Closed-form ridge on standardised features with an unpenalised
/// intercept: minimises sum_i w_i (y_i - b - z_i . beta)^2 + alpha |beta|^2.
/// With weighted centring the intercept is the weighted mean of y.
inline RidgeModel ridge_fit(const Eigen::MatrixXd& X, const std::vector<std::string>& names,
                            const std::vector<double>& y, double alpha, const RidgeOptions& opts = {}) {
  if (static_cast<std::size_t>(X.cols()) != names.size())
    fail(ErrorCode::LengthMismatch, "feature matrix has " + std::to_string(X.cols()) + " columns but " +
                                        std::to_string(names.size()) + " names");
  if (static_cast<std::size_t>(X.rows()) != y.size()) fail(ErrorCode::LengthMismatch, "X and y differ in rows");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail(ErrorCode::InvalidInput, "alpha must be positive");
  if (!opts.sample_weights.empty() && opts.sample_weights.size() != y.size())
    fail(ErrorCode::LengthMismatch, "sample weights differ in length from y");

  std::vector<Eigen::Index> rows;
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    const double w = opts.sample_weights.empty() ? 1.0 : opts.sample_weights[static_cast<std::size_t>(r)];
    if (w < 0.0 || !std::isfinite(w)) fail(ErrorCode::InvalidInput, "sample weights must be finite and >= 0");
    if (w > 0.0) rows.push_back(r);
  }
  if (rows.size() < 2) fail(ErrorCode::TooFewRows, "ridge_fit needs at least 2 rows with positive weight");

  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd Xs(n, X.cols());
  Eigen::VectorXd ys(n), ws(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Xs.row(i) = X.row(rows[static_cast<std::size_t>(i)]);
    ys(i) = y[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])];
    ws(i) = opts.sample_weights.empty() ? 1.0 : opts.sample_weights[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])];
  }
  if (!Xs.allFinite() || !ys.allFinite()) fail(ErrorCode::InvalidInput, "features and targets must be finite");
  const double wsum = ws.sum();

  RidgeModel m;
  m.alpha = alpha;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    const double mu = ws.dot(Xs.col(c)) / wsum;
    const double var = ws.dot((Xs.col(c).array() - mu).square().matrix()) / wsum;
    const double sd = std::sqrt(var);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mu)))) {
      m.dropped_features.push_back(names[static_cast<std::size_t>(c)]);
      continue;
    }
    kept.push_back(c);
    m.feature_names.push_back(names[static_cast<std::size_t>(c)]);
    m.means.push_back(mu);
    m.stds.push_back(sd);
  }

  m.bias = ws.dot(ys) / wsum;
  m.weights.assign(kept.size(), 0.0);
  if (ys.maxCoeff() == ys.minCoeff()) {
    m.degenerate_targets = true;
    return m;
  }
  if (kept.empty()) return m;

  const auto p = static_cast<Eigen::Index>(kept.size());
  Eigen::MatrixXd Z(n, p);
  for (Eigen::Index k = 0; k < p; ++k)
    Z.col(k) = (Xs.col(kept[static_cast<std::size_t>(k)]).array() - m.means[static_cast<std::size_t>(k)]) /
               m.stds[static_cast<std::size_t>(k)];
  const Eigen::MatrixXd ZtW = Z.transpose() * ws.asDiagonal();
  Eigen::MatrixXd A = ZtW * Z;
  A.diagonal().array() += alpha;
  const Eigen::VectorXd b = ZtW * (ys.array() - m.bias).matrix();
  const Eigen::VectorXd beta = A.ldlt().solve(b);
  for (Eigen::Index k = 0; k < p; ++k) m.weights[static_cast<std::size_t>(k)] = beta(k);
  return m;
}

inline RidgeModel ridge_fit(const FeatureTable& t, const std::vector<double>& y, double alpha,
                            const RidgeOptions& opts = {}) {
  return ridge_fit(t.values, t.names, y, alpha, opts);
}

namespace detail {

inline std::vector<std::size_t> resolve_columns(const std::vector<std::string>& wanted,
                                                const std::vector<std::string>& have) {
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < have.size(); ++i) index.emplace(have[i], i);
  std::vector<std::size_t> cols;
  cols.reserve(wanted.size());
  for (const auto& w : wanted) {
    auto it = index.find(w);
    if (it == index.end()) fail(ErrorCode::MissingFeature, "feature '" + w + "' is not available");
    cols.push_back(it->second);
  }
  return cols;
}

}  // namespace detail

inline double predict(const RidgeModel& m, const FeatureVector& x) {
  const auto cols = detail::resolve_columns(m.feature_names, x.names);
  double s = m.bias;
  for (std::size_t k = 0; k < cols.size(); ++k) s += m.weights[k] * (x.values[cols[k]] - m.means[k]) / m.stds[k];
  return s;
}

inline std::vector<double> predict(const RidgeModel& m, const FeatureTable& t) {
  const auto cols = detail::resolve_columns(m.feature_names, t.names);
  std::vector<double> out(static_cast<std::size_t>(t.rows()));
  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    double s = m.bias;
    for (std::size_t k = 0; k < cols.size(); ++k)
      s += m.weights[k] * (t.values(r, static_cast<Eigen::Index>(cols[k])) - m.means[k]) / m.stds[k];
    out[static_cast<std::size_t>(r)] = s;
  }
  return out;
}

/// 13 log-spaced values from 1e-6 to 1e6.
inline std::vector<double> default_alpha_grid() {
  std::vector<double> g;
  for (int e = -6; e <= 6; ++e) g.push_back(std::pow(10.0, e));
  return g;
}

inline constexpr double kDefaultSplitFraction = 0.8;

struct AlphaSearchResult {
  RidgeModel model;  // refit on all rows with the chosen alpha
  double alpha = 0.0;
  std::vector<double> validation_rmse;  // one per grid value
};

namespace detail {

inline Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const std::vector<std::size_t>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), X.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

inline std::vector<double> take(const std::vector<double>& v, const std::vector<std::size_t>& idx) {
  std::vector<double> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

inline double holdout_rmse(const RidgeModel& m, const Eigen::MatrixXd& X, const std::vector<std::string>& names,
                           const std::vector<double>& y) {
  FeatureTable t{{}, names, X};
  const auto pred = predict(m, t);
  double ss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) ss += (pred[i] - y[i]) * (pred[i] - y[i]);
  return std::sqrt(ss / static_cast<double>(y.size()));
}

inline std::size_t pick_best(const std::vector<double>& scores) {
  return static_cast<std::size_t>(std::min_element(scores.begin(), scores.end()) - scores.begin());
}

}  // namespace detail

/// Seeded holdout selection: rows are shuffled by random_permutation(n, seed),
/// the first round(split_fraction * n) train and the rest validate. The alpha
/// with the lowest validation RMSE (earliest on ties) is refit on all rows.
inline AlphaSearchResult alpha_search(const Eigen::MatrixXd& X, const std::vector<std::string>& names,
                                      const std::vector<double>& y, std::vector<double> grid = default_alpha_grid(),
                                      double split_fraction = kDefaultSplitFraction, std::uint64_t seed = 0) {
  if (grid.empty()) fail(ErrorCode::InvalidInput, "alpha grid is empty");
  if (!(split_fraction > 0.0 && split_fraction < 1.0))
    fail(ErrorCode::InvalidInput, "split_fraction must lie in (0, 1)");
  const std::size_t n = y.size();
  const auto n_train = static_cast<std::size_t>(std::llround(split_fraction * static_cast<double>(n)));
  if (n_train < 2 || n_train >= n)
    fail(ErrorCode::TooFewRows, std::to_string(n) + " rows cannot be split " + std::to_string(split_fraction) +
                                    " / " + std::to_string(1.0 - split_fraction));
  const auto perm = random_permutation(n, seed);
  const std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  const std::vector<std::size_t> valid(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  const auto Xt = detail::take_rows(X, train), Xv = detail::take_rows(X, valid);
  const auto yt = detail::take(y, train), yv = detail::take(y, valid);

  AlphaSearchResult res;
  for (double a : grid) res.validation_rmse.push_back(detail::holdout_rmse(ridge_fit(Xt, names, yt, a), Xv, names, yv));
  res.alpha = grid[detail::pick_best(res.validation_rmse)];
  res.model = ridge_fit(X, names, y, res.alpha);
  return res;
}

/// k-fold variant: folds are contiguous blocks of the seeded permutation;
/// validation_rmse holds the mean fold RMSE per alpha.
inline AlphaSearchResult alpha_search_kfold(const Eigen::MatrixXd& X, const std::vector<std::string>& names,
                                            const std::vector<double>& y, std::vector<double> grid, std::size_t folds,
                                            std::uint64_t seed = 0) {
  if (grid.empty()) fail(ErrorCode::InvalidInput, "alpha grid is empty");
  const std::size_t n = y.size();
  if (folds < 2 || n < 2 * folds) fail(ErrorCode::TooFewRows, "too few rows for " + std::to_string(folds) + " folds");
  const auto perm = random_permutation(n, seed);
  AlphaSearchResult res;
  res.validation_rmse.assign(grid.size(), 0.0);
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t lo = f * n / folds, hi = (f + 1) * n / folds;
    std::vector<std::size_t> train, valid;
    for (std::size_t i = 0; i < n; ++i) (i >= lo && i < hi ? valid : train).push_back(perm[i]);
    const auto Xt = detail::take_rows(X, train), Xv = detail::take_rows(X, valid);
    const auto yt = detail::take(y, train), yv = detail::take(y, valid);
    for (std::size_t a = 0; a < grid.size(); ++a)
      res.validation_rmse[a] += detail::holdout_rmse(ridge_fit(Xt, names, yt, grid[a]), Xv, names, yv) / folds;
  }
  res.alpha = grid[detail::pick_best(res.validation_rmse)];
  res.model = ridge_fit(X, names, y, res.alpha);
  return res;
}

// ---------------------------------------------------------------------------
// Ensembles

struct EnsembleModel {
  std::vector<RidgeModel> members;
  std::vector<double> member_weights;  // nonnegative, sum to 1

  void normalize() {
    if (members.empty()) fail(ErrorCode::InvalidInput, "ensemble has no members");
    if (member_weights.empty()) member_weights.assign(members.size(), 1.0);
    if (member_weights.size() != members.size())
      fail(ErrorCode::LengthMismatch, "one weight per ensemble member is required");
    double s = 0.0;
    for (double w : member_weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorCode::InvalidInput, "member weights must be >= 0");
      s += w;
    }
    if (!(s > 0.0)) fail(ErrorCode::InvalidInput, "member weights sum to zero");
    for (double& w : member_weights) w /= s;
  }
};

inline double ensemble_predict(const EnsembleModel& m, const FeatureVector& x) {
  if (m.members.empty() || m.member_weights.size() != m.members.size())
    fail(ErrorCode::InvalidInput, "ensemble is not normalised");
  double s = 0.0;
  for (std::size_t k = 0; k < m.members.size(); ++k) s += m.member_weights[k] * predict(m.members[k], x);
  return s;
}

/// Groups feature names by the prefix before the first '.', i.e. by view.
inline std::vector<std::vector<std::string>> group_by_prefix(const std::vector<std::string>& names) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& n : names) {
    const std::string key = n.substr(0, n.find('.'));
    if (!groups.contains(key)) order.push_back(key);
    groups[key].push_back(n);
  }
  std::vector<std::vector<std::string>> out;
  for (const auto& k : order) out.push_back(groups[k]);
  return out;
}

struct EnsembleOptions {
  std::vector<double> alpha_grid = default_alpha_grid();
  double split_fraction = kDefaultSplitFraction;
  std::uint64_t seed = 0;
  RidgeOptions ridge;  // applied to the final refit of each member
};

/// One member over every group plus one per leave-one-group-out subset, all
/// equally weighted. With a single group the ensemble has one member.
inline EnsembleModel fit_group_ensemble(const FeatureTable& t, const std::vector<double>& y,
                                        const std::vector<std::vector<std::string>>& groups,
                                        const EnsembleOptions& opts = {}) {
  if (groups.empty()) fail(ErrorCode::InvalidInput, "no feature groups");
  std::vector<std::vector<std::string>> subsets;
  std::vector<std::string> all;
  for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
  subsets.push_back(all);
  if (groups.size() > 1)
    for (std::size_t leave = 0; leave < groups.size(); ++leave) {
      std::vector<std::string> s;
      for (std::size_t g = 0; g < groups.size(); ++g)
        if (g != leave) s.insert(s.end(), groups[g].begin(), groups[g].end());
      subsets.push_back(std::move(s));
    }

  EnsembleModel ens;
  for (std::size_t k = 0; k < subsets.size(); ++k) {
    const auto cols = detail::resolve_columns(subsets[k], t.names);
    Eigen::MatrixXd Xs(t.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) Xs.col(static_cast<Eigen::Index>(c)) = t.values.col(static_cast<Eigen::Index>(cols[c]));
    const auto search =
        alpha_search(Xs, subsets[k], y, opts.alpha_grid, opts.split_fraction, derive_seed(opts.seed, {k}));
    ens.members.push_back(opts.ridge.sample_weights.empty() ? search.model
                                                            : ridge_fit(Xs, subsets[k], y, search.alpha, opts.ridge));
  }
  ens.normalize();
  return ens;
}

// ---------------------------------------------------------------------------
// A fitted predictor of either shape

struct Model {
  std::variant<RidgeModel, EnsembleModel> head;

  double operator()(const FeatureVector& x) const {
    return std::visit(
        [&](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, RidgeModel>) return predict(m, x);
          else return ensemble_predict(m, x);
        },
        head);
  }

  std::vector<double> operator()(const FeatureTable& t) const {
    std::vector<double> out(static_cast<std::size_t>(t.rows()));
    for (Eigen::Index r = 0; r < t.rows(); ++r) out[static_cast<std::size_t>(r)] = (*this)(t.row(r));
    return out;
  }
};

/// Predicts `samples` times, re-seeding the stochastic views for sample s
/// with derive_seed(seed, {s}), and returns the mean prediction. Samples run
/// on up to `threads` workers and are reduced in index order.
inline double multi_sample_predict(const Model& model, const Image& img, const ViewSet& set, std::size_t samples,
                                   std::uint64_t seed, unsigned threads = 1) {
  if (samples < 1) fail(ErrorCode::InvalidInput, "samples must be >= 1");
  std::vector<double> preds(samples);
  parallel_for(samples, threads, [&](std::size_t s) {
    preds[s] = model(extract_features(img, reseed(set, derive_seed(seed, {s}))));
  });
  double sum = 0.0;
  for (double p : preds) sum += p;
  return sum / static_cast<double>(samples);
}

struct PseudoLabelOptions {
  double pseudo_weight = 1.0;
  /// Raise EmptyUnlabeled instead of falling back to a labeled-only fit.
  bool require_unlabeled = false;
};

/// Refits a ridge student on the labeled rows plus `unlabeled` rows carrying
/// `pseudo` targets, the latter weighted by pseudo_weight. The student uses
/// the labeled table's feature columns.
inline RidgeModel pseudo_label_finetune(const FeatureTable& labeled, const std::vector<double>& y,
                                        const FeatureTable& unlabeled, const std::vector<double>& pseudo,
                                        double alpha, const PseudoLabelOptions& opts = {}) {
  if (unlabeled.rows() == 0) {
    if (opts.require_unlabeled) fail(ErrorCode::EmptyUnlabeled, "no unlabeled rows to pseudo-label");
    return ridge_fit(labeled, y, alpha);
  }
  if (!(opts.pseudo_weight >= 0.0)) fail(ErrorCode::InvalidInput, "pseudo_weight must be >= 0");
  if (pseudo.size() != static_cast<std::size_t>(unlabeled.rows()))
    fail(ErrorCode::LengthMismatch, "pseudo labels do not match unlabeled rows");
  const auto cols = detail::resolve_columns(labeled.names, unlabeled.names);

  const Eigen::Index nl = labeled.rows(), nu = unlabeled.rows();
  Eigen::MatrixXd X(nl + nu, labeled.values.cols());
  X.topRows(nl) = labeled.values;
  for (std::size_t c = 0; c < cols.size(); ++c)
    X.bottomRows(nu).col(static_cast<Eigen::Index>(c)) = unlabeled.values.col(static_cast<Eigen::Index>(cols[c]));
  std::vector<double> yy = y;
  yy.insert(yy.end(), pseudo.begin(), pseudo.end());
  RidgeOptions ro;
  ro.sample_weights.assign(static_cast<std::size_t>(nl), 1.0);
  ro.sample_weights.resize(static_cast<std::size_t>(nl + nu), opts.pseudo_weight);
  return ridge_fit(X, labeled.names, yy, alpha, ro);
}

/// Labels `unlabeled` with `teacher`, then refits as above.
inline RidgeModel pseudo_label_finetune(const FeatureTable& labeled, const std::vector<double>& y,
                                        const FeatureTable& unlabeled, const Model& teacher, double alpha,
                                        const PseudoLabelOptions& opts = {}) {
  if (unlabeled.rows() == 0) return pseudo_label_finetune(labeled, y, unlabeled, std::vector<double>{}, alpha, opts);
  return pseudo_label_finetune(labeled, y, unlabeled, teacher(unlabeled), alpha, opts);
}

// ---------------------------------------------------------------------------
// Serialisation

inline nlohmann::json to_json(const RidgeModel& m) {
  return {{"feature_names", m.feature_names}, {"means", m.means},
          {"stds", m.stds},                   {"weights", m.weights},
          {"bias", m.bias},                   {"alpha", m.alpha},
          {"dropped_features", m.dropped_features}, {"degenerate_targets", m.degenerate_targets}};
}

inline RidgeModel ridge_from_json(const nlohmann::json& j) {
  RidgeModel m;
  try {
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.means = j.at("means").get<std::vector<double>>();
    m.stds = j.at("stds").get<std::vector<double>>();
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.alpha = j.at("alpha").get<double>();
    m.dropped_features = j.value("dropped_features", std::vector<std::string>{});
    m.degenerate_targets = j.value("degenerate_targets", false);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("ridge model: ") + e.what());
  }
  const auto p = m.feature_names.size();
  if (m.means.size() != p || m.stds.size() != p || m.weights.size() != p)
    fail(ErrorCode::ParseError, "ridge model vectors disagree in length");
  return m;
}

/// A model plus the view configuration its features were computed with.
struct ModelFile {
  Model model;
  std::optional<ViewSet> views;
};

inline std::string config_hash(const ViewSet& set) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash_name(view_set_to_json(set).dump() + "|features-v1")));
  return buf;
}

inline nlohmann::json to_json(const ModelFile& f) {
  nlohmann::json j;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, RidgeModel>) {
          j["type"] = "ridge";
          j["ridge"] = to_json(m);
        } else {
          j["type"] = "ensemble";
          nlohmann::json members = nlohmann::json::array();
          for (const auto& r : m.members) members.push_back(to_json(r));
          j["members"] = members;
          j["member_weights"] = m.member_weights;
        }
      },
      f.model.head);
  if (f.views) {
    j["views"] = view_set_to_json(*f.views);
    j["config_hash"] = config_hash(*f.views);
  }
  return j;
}

inline ModelFile model_from_json(const nlohmann::json& j) {
  ModelFile f;
  const std::string type = j.value("type", "");
  if (type == "ridge") {
    f.model.head = ridge_from_json(j.at("ridge"));
  } else if (type == "ensemble") {
    EnsembleModel e;
    for (const auto& r : j.at("members")) e.members.push_back(ridge_from_json(r));
    e.member_weights = j.at("member_weights").get<std::vector<double>>();
    e.normalize();
    f.model.head = std::move(e);
  } else {
    fail(ErrorCode::ParseError, "unknown model type '" + type + "'");
  }
  if (j.contains("views")) {
    f.views = view_set_from_json(j.at("views"));
    if (j.contains("config_hash") && j.at("config_hash").get<std::string>() != config_hash(*f.views))
      fail(ErrorCode::ParseError, "config_hash does not match the stored view set");
  }
  return f;
}

// ---------------------------------------------------------------------------
// Feature tables on disk: `image_id,<feature>...`

inline void write_feature_table(std::ostream& out, const FeatureTable& t) {
  out << "image_id";
  for (const auto& n : t.names) out << ',' << csv::quote(n);
  out << '\n';
  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    out << csv::quote(t.ids[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < t.values.cols(); ++c) out << ',' << csv::format_double(t.values(r, c));
    out << '\n';
  }
}

inline FeatureTable read_feature_table(std::istream& in) {
  const auto t = csv::read(in);
  const auto cid = t.column("image_id");
  if (cid < 0) fail(ErrorCode::MissingColumn, "feature table needs an image_id column");
  FeatureTable ft;
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < t.header.size(); ++c)
    if (static_cast<std::ptrdiff_t>(c) != cid) {
      ft.names.push_back(t.header[c]);
      cols.push_back(c);
    }
  ft.values.resize(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    ft.ids.push_back(t.rows[r][static_cast<std::size_t>(cid)]);
    for (std::size_t c = 0; c < cols.size(); ++c)
      ft.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          csv::parse_double(t.rows[r][cols[c]], "row " + std::to_string(t.line_numbers[r]));
  }
  return ft;
}

}  // namespace uhdiqa
