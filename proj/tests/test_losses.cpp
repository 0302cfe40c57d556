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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "uhdiqa/losses.hpp"

using namespace uhdiqa;

namespace {

using LossFn = LossValue (*)(std::span<const double>, std::span<const double>);

std::vector<double> uniform(std::mt19937_64& g, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(g);
  return v;
}

double max_gradient_error(LossFn f, const std::vector<double>& p, const std::vector<double>& q) {
  const auto lv = f(p, q);
  double worst = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double fd = oracle::fd_derivative([&](const std::vector<double>& x) { return f(x, q).value; }, p, i, 1e-6);
    worst = std::max(worst, oracle::rel_err(lv.gradient[i], fd));
  }
  return worst;
}

LossValue rank0(std::span<const double> p, std::span<const double> q) { return rank_loss(p, q, 0.0); }

}  // namespace

TEST(Mse, HandCases) {
  const std::vector<double> a{0.2, 0.4};
  const auto z = mse_loss(a, a);
  EXPECT_EQ(z.value, 0.0);
  EXPECT_EQ(z.gradient, (std::vector<double>{0, 0}));
  const std::vector<double> p{1}, q{0};
  const auto one = mse_loss(p, q);
  EXPECT_EQ(one.value, 1.0);
  EXPECT_EQ(one.gradient, (std::vector<double>{2}));
}

TEST(Mse, LengthMismatch) {
  const std::vector<double> p{1, 2}, q{1};
  try {
    mse_loss(p, q);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
}

TEST(PlccLoss, Extremes) {
  const std::vector<double> q{0.1, 0.7, 0.3, 0.9}, m{-0.1, -0.7, -0.3, -0.9};
  EXPECT_NEAR(plcc_loss(q, q).value, 0.0, 1e-15);
  EXPECT_NEAR(plcc_loss(m, q).value, 1.0, 1e-15);
}

TEST(PlccLoss, ZeroVariance) {
  const std::vector<double> p{1, 1, 1}, q{1, 2, 3};
  try {
    plcc_loss(p, q);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroVariance);
  }
}

TEST(RankLoss, HandCases) {
  const std::vector<double> q{1, 0}, p{0, 1};
  const auto l = rank_loss(p, q, 0.0);
  EXPECT_EQ(l.value, 1.0);
  EXPECT_EQ(l.gradient, (std::vector<double>{-1, 1}));

  const std::vector<double> q3{0.1, 0.5, 0.9}, p3{0, 1, 2};
  EXPECT_EQ(rank_loss(p3, q3, 0.5).value, 0.0);
}

TEST(RankLoss, TiedTargetsSkipped) {
  const std::vector<double> q{0.5, 0.5}, p{1, 0};
  const auto l = rank_loss(p, q, 1.0);
  EXPECT_EQ(l.value, 0.0);
  EXPECT_EQ(l.gradient, (std::vector<double>{0, 0}));
}

TEST(RankLoss, MatchesPairLoopOracle) {
  std::mt19937_64 g(15);
  for (int t = 0; t < 50; ++t) {
    const auto p = uniform(g, 15), q = uniform(g, 15);
    for (double margin : {0.0, 0.1, 0.5})
      EXPECT_NEAR(rank_loss(p, q, margin).value, oracle::rank_loss(p, q, margin), 1e-12);
  }
}

TEST(FidelityLoss, HandCases) {
  const std::vector<double> q{1, 0}, eq{0.3, 0.3};
  EXPECT_NEAR(fidelity_loss(eq, q).value, 1 - std::sqrt(0.5), 1e-15);
  const std::vector<double> far{40, -40};
  EXPECT_NEAR(fidelity_loss(far, q).value, 0.0, 1e-15);
}

TEST(FidelityLoss, TiedTargetsUseHalf) {
  // P = 0.5 and p equal: 1 - 2 sqrt(0.25) = 0.
  const std::vector<double> q{0.4, 0.4}, p{0.2, 0.2};
  EXPECT_NEAR(fidelity_loss(p, q).value, 0.0, 1e-15);
}

TEST(MapScores, LinearMapAndEndpoints) {
  const std::vector<double> p{0, 0.5, 1}, q{0.2, 0.8, 0.5};
  const auto m = map_scores(p, q);
  EXPECT_EQ(m[0], 0.2);
  EXPECT_NEAR(m[1], 0.5, 1e-15);
  EXPECT_EQ(m[2], 0.8);
}

TEST(MapScores, DegenerateRange) {
  const std::vector<double> p{0.3, 0.3}, q{0, 1};
  try {
    map_scores(p, q);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateRange);
  }
}

TEST(MapScores, PreservesRankCorrelationsExactly) {
  std::mt19937_64 g(33);
  for (int t = 0; t < 100; ++t) {
    const auto p = uniform(g, 50), q = uniform(g, 50);
    const auto m = map_scores(p, q);
    EXPECT_EQ(*std::min_element(m.begin(), m.end()), *std::min_element(q.begin(), q.end()));
    EXPECT_EQ(*std::max_element(m.begin(), m.end()), *std::max_element(q.begin(), q.end()));
    EXPECT_EQ(stats::spearman(p, q), stats::spearman(m, q));
    EXPECT_EQ(stats::kendall(p, q), stats::kendall(m, q));
  }
}

TEST(CompositeLoss, IsRankPlusPlcc) {
  std::mt19937_64 g(2);
  const auto p = uniform(g, 20), q = uniform(g, 20);
  const auto c = composite_loss(p, q), r = rank_loss(p, q), l = plcc_loss(p, q);
  EXPECT_NEAR(c.value, r.value + l.value, 1e-15);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(c.gradient[i], r.gradient[i] + l.gradient[i], 1e-15);
  const std::vector<double> s{0.1, 0.4, 0.2, 0.8};
  EXPECT_NEAR(composite_loss(s, s).value, 0.0, 1e-15);
}

// Gradient checks against central differences.

class GradientCheck : public ::testing::TestWithParam<std::pair<const char*, LossFn>> {};

TEST_P(GradientCheck, MatchesCentralDifferences) {
  std::mt19937_64 g(99);
  for (int t = 0; t < 100; ++t) {
    const auto p = uniform(g, 12), q = uniform(g, 12);
    ASSERT_LT(max_gradient_error(GetParam().second, p, q), 1e-5) << GetParam().first << " trial " << t;
  }
}

INSTANTIATE_TEST_SUITE_P(Losses, GradientCheck,
                         ::testing::Values(std::pair<const char*, LossFn>{"mse", &mse_loss},
                                           std::pair<const char*, LossFn>{"plcc", &plcc_loss},
                                           std::pair<const char*, LossFn>{"fidelity", &fidelity_loss},
                                           std::pair<const char*, LossFn>{"rank", &rank0},
                                           std::pair<const char*, LossFn>{"composite", &composite_loss}),
                         [](const auto& info) { return std::string(info.param.first); });

TEST(LossProperties, RangesAndPermutationEquivariance) {
  std::mt19937_64 g(7);
  for (int t = 0; t < 50; ++t) {
    const auto p = uniform(g, 10), q = uniform(g, 10);
    const auto pl = plcc_loss(p, q).value, fl = fidelity_loss(p, q).value, rl = rank_loss(p, q, 0.2).value;
    EXPECT_GE(pl, 0.0);
    EXPECT_LE(pl, 1.0);
    EXPECT_GE(fl, 0.0);
    EXPECT_LE(fl, 1.0);
    EXPECT_GE(rl, 0.0);

    std::vector<std::size_t> perm(p.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), g);
    std::vector<double> pp(p.size()), qq(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) pp[i] = p[perm[i]], qq[i] = q[perm[i]];
    for (LossFn f : {LossFn{&mse_loss}, LossFn{&plcc_loss}, LossFn{&fidelity_loss}, LossFn{&rank0}}) {
      const auto a = f(p, q), b = f(pp, qq);
      EXPECT_NEAR(a.value, b.value, 1e-13);
      for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(b.gradient[i], a.gradient[perm[i]], 1e-13);
    }
  }
}
