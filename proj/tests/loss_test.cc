/*
 * Copyright 2026 The SGR Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "sgr/loss.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sgr/error.h"

namespace sgr {
namespace {

constexpr double kTol = 1e-9;

ContinuationScore Cont(std::vector<double> lps) { return MakeContinuationScore(std::move(lps)); }

TEST(LinkLossTest, Fixtures) {
  EXPECT_NEAR(LinkLoss(1 - kProbabilityEpsilon, 1).value, 0.0, 1e-6);
  EXPECT_NEAR(LinkLoss(0.5, 1).value, std::log(2.0), kTol);
  EXPECT_NEAR(LinkLoss(0.5, 0).value, 0.693147180560, kTol);
  EXPECT_NEAR(LinkLoss(0.9, 0).value, 2.302585092994, kTol);
  EXPECT_NEAR(LinkLoss(0.9, 1).value, -std::log(0.9), kTol);
}

TEST(LinkLossTest, ClampsExtremes) {
  EXPECT_NEAR(LinkLoss(0.0, 1).value, -std::log(kProbabilityEpsilon), 1e-9);
  EXPECT_NEAR(LinkLoss(1.0, 0).value, -std::log(kProbabilityEpsilon), 1e-6);
  EXPECT_TRUE(std::isfinite(LinkLoss(-3.0, 1).value));
  EXPECT_THROW(LinkLoss(0.5, 2), Error);
}

TEST(LinkLossTest, ConvexInP) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.001, 0.999);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng);
    for (int z : {0, 1}) {
      const double mid = LinkLoss((a + b) / 2, z).value;
      EXPECT_LE(mid, (LinkLoss(a, z).value + LinkLoss(b, z).value) / 2 + 1e-12);
    }
  }
}

TEST(LinkLossTest, FiniteDifference) {
  const double h = 1e-5;
  const double d = (LinkLoss(0.5 + h, 1).value - LinkLoss(0.5 - h, 1).value) / (2 * h);
  EXPECT_NEAR(d, -2.0, 1e-4);
}

TEST(NodeLossTest, Fixtures) {
  EXPECT_NEAR(NodeLoss(Cont({-0.1, -0.2, -0.3})).value, 0.6, kTol);
  EXPECT_EQ(NodeLoss(Cont({0.0})).value, 0.0);
  const ContinuationScore c = Cont({-1.25, -0.5, -3.0});
  EXPECT_NEAR(NodeLoss(c).value, -c.total, 1e-12);
  EXPECT_EQ(NodeLoss(c).components.size(), 3u);
  try {
    NodeLoss(ContinuationScore{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyTarget);
  }
}

TEST(ContrastiveLossTest, Fixtures) {
  EXPECT_NEAR(ContrastiveLoss(Cont({-1.0}), Cont({-1.0})).value, std::log(2.0), kTol);
  EXPECT_NEAR(ContrastiveLoss(Cont({-1.0}), Cont({-2.0})).value, 0.313261687518, kTol);
  EXPECT_NEAR(ContrastiveLoss(Cont({-0.5, -0.5}), Cont({-2.0})).value,
              std::log1p(std::exp(-1.0)), kTol);
  EXPECT_NEAR(ContrastiveLoss(Cont({-1.0}), Cont({-2.0})).components.at(0), 1.0, kTol);
}

TEST(ContrastiveLossTest, MonotoneLimit) {
  double prev = INFINITY;
  for (double delta = -50; delta <= 800; delta += 5) {
    const double v = ContrastiveLoss(Cont({0.0}), Cont({-std::max(delta, 0.0)})).value;
    EXPECT_LE(v, prev);
    EXPECT_GE(v, 0.0);
    prev = v;
  }
  EXPECT_LT(prev, 1e-300);
  EXPECT_TRUE(std::isfinite(ContrastiveLoss(Cont({-900.0}), Cont({0.0})).value));
  EXPECT_NEAR(ContrastiveLoss(Cont({-900.0}), Cont({0.0})).value, 900.0, 1e-9);
}

TEST(ContrastiveLossTest, SymmetricSumBound) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-20, 0);
  for (int i = 0; i < 500; ++i) {
    const auto a = Cont({u(rng)}), b = Cont({u(rng)});
    EXPECT_GE(ContrastiveLoss(a, b).value + ContrastiveLoss(b, a).value,
              2 * std::log(2.0) - 1e-12);
  }
  const auto a = Cont({-3.0});
  EXPECT_NEAR(ContrastiveLoss(a, a).value * 2, 2 * std::log(2.0), kTol);
}

TEST(ContrastiveLossTest, PrintedSigmoidForm) {
  const double v =
      ContrastiveLoss(Cont({-1.0}), Cont({-2.0}), ContrastiveForm::kNegSigmoid).value;
  EXPECT_NEAR(v, -1.0 / (1.0 + std::exp(-1.0)), kTol);
}

TEST(RankLossTest, Fixtures) {
  const std::vector<double> equal(5, 0.3);
  const std::vector<std::size_t> first = {0};
  EXPECT_NEAR(RankLoss(equal, first).value, std::log(5.0), kTol);
  const std::vector<double> s = {2, 1, 0};
  EXPECT_NEAR(RankLoss(s, first).value, 0.407605964444, kTol);
  EXPECT_NEAR(RankLoss(s, first).value, std::log(1 + std::exp(-1.0) + std::exp(-2.0)), kTol);
  const std::vector<std::size_t> two = {0, 2};
  const LossValue both = RankLoss(s, two);
  EXPECT_EQ(both.components.size(), 2u);
  EXPECT_NEAR(both.value, both.components[0] + both.components[1], 1e-12);
  const std::vector<double> single = {-7.5};
  EXPECT_NEAR(RankLoss(single, first).value, 0.0, kTol);
}

TEST(RankLossTest, Errors) {
  const std::vector<double> s = {1, 2};
  try {
    RankLoss(s, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoPositives);
  }
  const std::vector<std::size_t> bad = {2};
  EXPECT_THROW(RankLoss(s, bad), Error);
}

TEST(RankLossTest, ShiftInvariantAndStable) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> s(1 + rng() % 50);
    for (double& x : s) x = u(rng);
    const std::vector<std::size_t> pos = {rng() % s.size()};
    const double base = RankLoss(s, pos).value;
    const double c = u(rng) * 100;
    std::vector<double> shifted = s;
    for (double& x : shifted) x += c;
    ASSERT_NEAR(RankLoss(shifted, pos).value, base, 1e-9);
  }
  const std::vector<double> huge = {1000, 999, 0};
  const std::vector<std::size_t> pos = {1};
  EXPECT_NEAR(RankLoss(huge, pos).value, 1.0 + std::log1p(std::exp(-1.0)), 1e-9);
}

TEST(RankLossTest, PermutationEquivariant) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 2 + rng() % 10;
    std::vector<double> s(n);
    for (double& x : s) x = u(rng);
    std::vector<std::size_t> pos = {0, n - 1};
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> ps(n);
    std::vector<std::size_t> where(n);
    for (std::size_t k = 0; k < n; ++k) {
      ps[perm[k]] = s[k];
      where[k] = perm[k];
    }
    const std::vector<std::size_t> ppos = {where[0], where[n - 1]};
    EXPECT_NEAR(RankLoss(ps, ppos).value, RankLoss(s, pos).value, 1e-12);
  }
}

TEST(SoftplusTest, Stable) {
  EXPECT_NEAR(Softplus(0), std::log(2.0), 1e-15);
  EXPECT_EQ(Softplus(1000), 1000);
  EXPECT_GT(Softplus(-1000), -1e-300);
  EXPECT_NEAR(Softplus(-1), std::log1p(std::exp(-1.0)), 1e-15);
}

}  // namespace
}  // namespace sgr
