/*
 * Copyright 2026 The memorability authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "memorability/rank_metrics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"

namespace memorability {
namespace {

TEST(AverageRanks, TiesShareMeanPosition) {
  EXPECT_EQ(average_ranks(std::vector<double>{10, 20, 20, 30}), (std::vector<double>{1, 2.5, 2.5, 4}));
  EXPECT_EQ(average_ranks(std::vector<double>{5, 5, 5}), (std::vector<double>{2, 2, 2}));
  EXPECT_EQ(average_ranks(std::vector<double>{3, 1, 2}), (std::vector<double>{3, 1, 2}));
}

TEST(AverageRanks, MatchesBruteForceOracle) {
  std::mt19937 gen(11);
  std::uniform_int_distribution<int> small(0, 4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + trial % 12);
    for (double& x : v) x = small(gen);
    EXPECT_EQ(average_ranks(v), oracle::brute_force_ranks(v));
  }
}

TEST(Pearson, ExactLinearity) {
  EXPECT_DOUBLE_EQ(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}), 1.0);
  EXPECT_DOUBLE_EQ(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}), -1.0);
}

TEST(Pearson, QuadraticMatchesCovarianceOracle) {
  // sxy = 8, sxx = 2, syy = 294/9  =>  r = 24 / sqrt(588)
  const double r = pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 4, 9});
  EXPECT_NEAR(r, 0.989743318610787, 1e-15);
  EXPECT_GT(r, 0.96);
  EXPECT_LT(r, 1.0);
}

TEST(Pearson, ConstantInputIsAnError) {
  EXPECT_THROW(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), InvalidArgument);
  try {
    pearson(std::vector<double>{1, 2, 3}, std::vector<double>{4, 4, 4});
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("undefined correlation"), std::string::npos);
  }
}

TEST(Pearson, RejectsMismatchedAndShortInputs) {
  EXPECT_THROW(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), InvalidArgument);
  EXPECT_THROW(pearson(std::vector<double>{1}, std::vector<double>{1}), InvalidArgument);
  EXPECT_THROW(pearson(std::vector<double>{1, NAN}, std::vector<double>{1, 2}), InvalidArgument);
}

TEST(Spearman, Examples) {
  EXPECT_DOUBLE_EQ(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{1, 4, 9}), 1.0);
  EXPECT_NEAR(spearman(std::vector<double>{1, 2, 2, 4}, std::vector<double>{1, 2, 3, 4}), std::sqrt(0.9), 1e-12);
  EXPECT_DOUBLE_EQ(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{4, 3, 2, 1}), -1.0);
}

TEST(Spearman, TieCaseMatchesBruteForceOracle) {
  const std::vector<double> a{1, 2, 2, 4}, b{1, 2, 3, 4};
  EXPECT_NEAR(spearman(a, b), oracle::pearson_long_double(oracle::brute_force_ranks(a), oracle::brute_force_ranks(b)),
              1e-15);
}

TEST(Spearman, ConstantRanksAreAnError) {
  EXPECT_THROW(spearman(std::vector<double>{2, 2, 2}, std::vector<double>{1, 2, 3}), InvalidArgument);
}

TEST(Spearman, InvariantUnderMonotoneTransforms) {
  std::mt19937 gen(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(30), b(30);
    for (auto& x : a) x = nd(gen);
    for (auto& x : b) x = nd(gen);
    const double base = spearman(a, b);
    std::vector<double> ta(a.size()), tb(b.size());
    std::transform(a.begin(), a.end(), ta.begin(), [](double x) { return std::exp(x); });
    std::transform(b.begin(), b.end(), tb.begin(), [](double x) { return x * x * x + 2.0 * x; });
    EXPECT_EQ(spearman(ta, tb), base);
  }
}

TEST(Correlation, SymmetricAndBounded) {
  std::mt19937 gen(5);
  std::uniform_int_distribution<int> coarse(0, 5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(2 + trial % 20), b(a.size());
    for (auto& x : a) x = coarse(gen);
    for (auto& x : b) x = coarse(gen);
    try {
      const double s = spearman(a, b);
      EXPECT_EQ(s, spearman(b, a));
      EXPECT_LE(std::abs(s), 1.0 + 1e-12);
      const double r = pearson(a, b);
      EXPECT_EQ(r, pearson(b, a));
      EXPECT_LE(std::abs(r), 1.0 + 1e-12);
    } catch (const InvalidArgument&) {
      // constant draw
    }
  }
}

TEST(Spearman, TieFreeMatchesClassicFormula) {
  std::mt19937 gen(9);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(3 + trial % 40), b(a.size());
    for (auto& x : a) x = nd(gen);
    for (auto& x : b) x = nd(gen);
    EXPECT_NEAR(spearman(a, b), oracle::classic_spearman(a, b), 1e-12);
  }
}

TEST(Spearman, AllPermutationsOfSixMatchClassicFormulaExactly) {
  std::vector<double> identity{1, 2, 3, 4, 5, 6};
  std::vector<double> perm = identity;
  int count = 0;
  do {
    EXPECT_EQ(spearman(identity, perm), oracle::classic_spearman(identity, perm));
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_EQ(count, 720);
}

}  // namespace
}  // namespace memorability
