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
#include <numbers>
#include <span>
#include <vector>

#include "uhdiqa/error.hpp"
#include "uhdiqa/metrics.hpp"

namespace uhdiqa {

/// A scalar loss and its gradient with respect to the predictions.
struct LossValue {
  double value = 0.0;
  std::vector<double> gradient;

  LossValue& operator+=(const LossValue& o) {
    value += o.value;
    for (std::size_t i = 0; i < gradient.size(); ++i) gradient[i] += o.gradient[i];
    return *this;
  }
};

namespace detail {

inline void check_loss_inputs(std::span<const double> p, std::span<const double> q, std::size_t min_size) {
  if (p.size() != q.size())
    fail(ErrorCode::LengthMismatch, "predictions and targets differ in length (" + std::to_string(p.size()) +
                                        " vs " + std::to_string(q.size()) + ")");
  if (p.size() < min_size) fail(ErrorCode::InvalidInput, "need at least " + std::to_string(min_size) + " values");
}

}  // namespace detail

/// value = mean (p - q)^2, gradient = 2 (p - q) / n.
inline LossValue mse_loss(std::span<const double> p, std::span<const double> q) {
  detail::check_loss_inputs(p, q, 1);
  const auto n = static_cast<double>(p.size());
  LossValue out{0.0, std::vector<double>(p.size())};
  std::vector<double> sq(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - q[i];
    sq[i] = d * d;
    out.gradient[i] = 2.0 * d / n;
  }
  out.value = stats::sum(sq) / n;
  return out;
}

/// value = (1 - r) / 2 with r the Pearson correlation of p and q.
/// dr/dp_i = dq_i / sqrt(Sxx Syy) - r dp_i / Sxx for centred dp, dq.
inline LossValue plcc_loss(std::span<const double> p, std::span<const double> q) {
  detail::check_loss_inputs(p, q, 2);
  const std::size_t n = p.size();
  const double mp = stats::mean(p), mq = stats::mean(q);
  std::vector<double> dp(n), dq(n), xy(n), xx(n), yy(n);
  for (std::size_t i = 0; i < n; ++i) {
    dp[i] = p[i] - mp;
    dq[i] = q[i] - mq;
    xy[i] = dp[i] * dq[i];
    xx[i] = dp[i] * dp[i];
    yy[i] = dq[i] * dq[i];
  }
  const double sxx = stats::sum(xx), syy = stats::sum(yy), sxy = stats::sum(xy);
  if (!(sxx > 0.0) || !(syy > 0.0)) fail(ErrorCode::ZeroVariance, "plcc_loss needs nonzero variance");
  const double denom = std::sqrt(sxx * syy);
  const double r = sxy / denom;

  LossValue out{0.5 * (1.0 - std::clamp(r, -1.0, 1.0)), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) out.gradient[i] = -0.5 * (dq[i] / denom - r * dp[i] / sxx);
  return out;
}

/// Hinge on every ordered pair with q_i > q_j:
/// mean of max(0, margin - (p_i - p_j)). Pairs tied in q are skipped. The
/// returned subgradient is 0 at the kink.
inline LossValue rank_loss(std::span<const double> p, std::span<const double> q, double margin = 0.0) {
  detail::check_loss_inputs(p, q, 2);
  if (!(margin >= 0.0)) fail(ErrorCode::InvalidInput, "margin must be nonnegative");
  const std::size_t n = p.size();
  LossValue out{0.0, std::vector<double>(n, 0.0)};
  std::vector<double> terms;
  std::vector<int> active_count(n, 0);
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!(q[i] > q[j])) continue;
      ++pairs;
      const double h = margin - (p[i] - p[j]);
      if (h > 0.0) {
        terms.push_back(h);
        --active_count[i];
        ++active_count[j];
      }
    }
  }
  if (pairs == 0) return out;
  const auto m = static_cast<double>(pairs);
  out.value = stats::sum(terms) / m;
  for (std::size_t i = 0; i < n; ++i) out.gradient[i] = active_count[i] / m;
  return out;
}

/// Pairwise fidelity loss with a Gaussian link. For each unordered pair
/// (i, j): P = 1, 0 or 0.5 as q_i >, < or == q_j, the model probability is
/// P^ = Phi((p_i - p_j) / sqrt 2), and the pair loss is
/// 1 - sqrt(P^ P) - sqrt((1 - P^)(1 - P)). Returns the mean over pairs.
inline LossValue fidelity_loss(std::span<const double> p, std::span<const double> q) {
  detail::check_loss_inputs(p, q, 2);
  const std::size_t n = p.size();
  const double inv_two_sqrt_pi = 0.5 / std::sqrt(std::numbers::pi);
  LossValue out{0.0, std::vector<double>(n, 0.0)};
  std::vector<double> terms;
  terms.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double target = q[i] > q[j] ? 1.0 : (q[i] < q[j] ? 0.0 : 0.5);
      const double d = p[i] - p[j];
      const double phat = 0.5 * std::erfc(-d / 2.0);     // Phi(d / sqrt 2)
      const double phat_c = 0.5 * std::erfc(d / 2.0);    // 1 - phat without cancellation
      terms.push_back(1.0 - std::sqrt(phat * target) - std::sqrt(phat_c * (1.0 - target)));

      // dl/dP^ times dP^/dd; each side vanishes when its target weight is 0.
      double dl_dphat = 0.0;
      if (target > 0.0 && phat > 0.0) dl_dphat -= 0.5 * std::sqrt(target / phat);
      if (target < 1.0 && phat_c > 0.0) dl_dphat += 0.5 * std::sqrt((1.0 - target) / phat_c);
      const double g = dl_dphat * inv_two_sqrt_pi * std::exp(-0.25 * d * d);
      out.gradient[i] += g;
      out.gradient[j] -= g;
    }
  }
  const auto m = static_cast<double>(terms.size());
  out.value = stats::sum(terms) / m;
  for (double& g : out.gradient) g /= m;
  return out;
}

/// Min-max remaps p onto the range of q. The arg-min/arg-max of p land on
/// min(q)/max(q) exactly and the map is monotone, so ranks are preserved.
inline std::vector<double> map_scores(std::span<const double> p, std::span<const double> q) {
  if (p.empty() || q.empty()) fail(ErrorCode::InvalidInput, "map_scores needs nonempty inputs");
  const auto [pmin_it, pmax_it] = std::minmax_element(p.begin(), p.end());
  const auto [qmin_it, qmax_it] = std::minmax_element(q.begin(), q.end());
  const double pmin = *pmin_it, pmax = *pmax_it, qmin = *qmin_it, qmax = *qmax_it;
  if (!(pmax > pmin)) fail(ErrorCode::DegenerateRange, "all predictions are equal");
  const double prange = pmax - pmin, qrange = qmax - qmin;
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == pmin) out[i] = qmin;
    else if (p[i] == pmax) out[i] = qmax;
    else out[i] = std::clamp((p[i] - pmin) / prange * qrange + qmin, qmin, qmax);
  }
  return out;
}

/// Rank hinge (margin 0) plus PLCC loss.
inline LossValue composite_loss(std::span<const double> p, std::span<const double> q) {
  LossValue out = rank_loss(p, q, 0.0);
  out += plcc_loss(p, q);
  return out;
}

}  // namespace uhdiqa
