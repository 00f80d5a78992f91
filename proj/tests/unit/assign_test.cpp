// Copyright 2026 The STT Tracking Authors. All Rights Reserved.
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

#include "stt/assign/hungarian.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace stt::assign {
namespace {

struct Best {
  std::size_t cardinality = 0;
  double cost = 0.0;
};

// Every injection of the smaller side into the larger, partial where forbidden.
Best brute_force(const CostMatrix& m) {
  const bool flip = m.rows() > m.cols();
  const std::size_t small = flip ? m.cols() : m.rows();
  const std::size_t large = flip ? m.rows() : m.cols();
  auto at = [&](std::size_t s, std::size_t l) { return flip ? m(l, s) : m(s, l); };

  std::vector<std::size_t> perm(large);
  std::iota(perm.begin(), perm.end(), 0);
  Best best;
  bool first = true;
  do {
    Best here;
    for (std::size_t s = 0; s < small; ++s) {
      const double c = at(s, perm[s]);
      if (c == kForbidden) continue;
      ++here.cardinality;
      here.cost += c;
    }
    if (first || here.cardinality > best.cardinality ||
        (here.cardinality == best.cardinality && here.cost < best.cost)) {
      best = here;
      first = false;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

CostMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                         double forbidden) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CostMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (u(rng) >= forbidden) m.set(r, c, u(rng));
    }
  }
  return m;
}

void expect_valid(const CostMatrix& m, const Matching& matching) {
  std::vector<bool> row_used(m.rows()), col_used(m.cols());
  for (std::size_t i = 0; i < matching.size(); ++i) {
    const auto [r, c] = matching[i];
    ASSERT_TRUE(m.allowed(r, c));
    ASSERT_FALSE(row_used[r]);
    ASSERT_FALSE(col_used[c]);
    row_used[r] = col_used[c] = true;
    if (i > 0) {
      ASSERT_LT(matching[i - 1].first, r);
    }
  }
}

TEST(Hungarian, SingleEntry) {
  CostMatrix m(1, 1);
  m.set(0, 0, 0.3);
  EXPECT_EQ(solve(m), (Matching{{0, 0}}));
}

TEST(Hungarian, IdentityCost) {
  CostMatrix m(3, 3, 1.0);
  for (std::size_t i = 0; i < 3; ++i) m.set(i, i, 0.0);
  const Matching out = solve(m);
  EXPECT_EQ(out, (Matching{{0, 0}, {1, 1}, {2, 2}}));
  EXPECT_EQ(total_cost(m, out), 0.0);
}

TEST(Hungarian, EmptyAndAllForbidden) {
  EXPECT_TRUE(solve(CostMatrix(0, 4)).empty());
  EXPECT_TRUE(solve(CostMatrix(3, 0)).empty());
  EXPECT_TRUE(solve(CostMatrix(3, 3)).empty());
}

TEST(Hungarian, PrefersCardinalityOverCost) {
  // Matching (0,0) alone costs 0 but blocks row 1; two matches are required.
  CostMatrix m(2, 2);
  m.set(0, 0, 0.0);
  m.set(0, 1, 0.9);
  m.set(1, 0, 0.9);
  EXPECT_EQ(solve(m), (Matching{{0, 1}, {1, 0}}));
}

TEST(Hungarian, TiesBreakLexicographically) {
  CostMatrix m(2, 2, 0.5);
  EXPECT_EQ(solve(m), (Matching{{0, 0}, {1, 1}}));
  CostMatrix wide(1, 3, 0.2);
  EXPECT_EQ(solve(wide), (Matching{{0, 0}}));
}

TEST(Hungarian, RejectsNanAndNegativeInfinity) {
  CostMatrix m(1, 1);
  EXPECT_THROW(m.set(0, 0, std::nan("")), std::invalid_argument);
  EXPECT_THROW(m.set(0, 0, -kForbidden), std::invalid_argument);
}

TEST(Hungarian, HandlesLargeMagnitudes) {
  CostMatrix m(2, 2);
  m.set(0, 0, 1e12);
  m.set(0, 1, 1.0);
  m.set(1, 0, 1.0);
  m.set(1, 1, 1e12);
  EXPECT_EQ(solve(m), (Matching{{0, 1}, {1, 0}}));
}

TEST(Hungarian, MatchesBruteForceSquare) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const CostMatrix m = random_matrix(rng, 6, 6, 0.2);
    const Matching out = solve(m);
    expect_valid(m, out);
    const Best best = brute_force(m);
    ASSERT_EQ(out.size(), best.cardinality) << "trial " << trial;
    ASSERT_NEAR(total_cost(m, out), best.cost, 1e-9) << "trial " << trial;
  }
}

TEST(Hungarian, MatchesBruteForceRectangular) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  std::uniform_real_distribution<double> density(0.0, 0.8);
  for (int trial = 0; trial < 500; ++trial) {
    const CostMatrix m = random_matrix(rng, dim(rng), dim(rng), density(rng));
    const Matching out = solve(m);
    expect_valid(m, out);
    const Best best = brute_force(m);
    ASSERT_EQ(out.size(), best.cardinality) << "trial " << trial;
    ASSERT_NEAR(total_cost(m, out), best.cost, 1e-9) << "trial " << trial;
  }
}

// Adding a constant to every allowed entry of a row cannot change which
// matching is optimal when every row is matched.
TEST(Hungarian, RowShiftInvariance) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const CostMatrix m = random_matrix(rng, 5, 5, 0.0);
    CostMatrix shifted = m;
    for (std::size_t c = 0; c < 5; ++c) shifted.set(2, c, m(2, c) + 3.0);
    EXPECT_NEAR(total_cost(shifted, solve(shifted)), total_cost(m, solve(m)) + 3.0, 1e-9);
  }
}

}  // namespace
}  // namespace stt::assign
