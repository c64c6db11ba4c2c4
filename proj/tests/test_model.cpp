// Copyright 2026 The mobilevel Authors
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

#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mobilevel/model.hpp"

namespace mobilevel {
namespace {

using testing::vec;

// Independent dominance oracle written out component by component.
bool oracle_dominates(const Vec& u, const Vec& v, bool weak) {
  bool all_le = true, all_lt = true, any_lt = false;
  for (Index i = 0; i < u.size(); ++i) {
    if (u(i) > v(i)) all_le = false;
    if (!(u(i) < v(i))) all_lt = false;
    if (u(i) < v(i)) any_lt = true;
  }
  return weak ? all_lt : (all_le && any_lt);
}

std::vector<std::size_t> oracle_filter(const std::vector<Vec>& pts, bool weak) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (oracle_dominates(pts[j], pts[i], weak)) dominated = true;
    }
    if (!dominated) keep.push_back(i);
  }
  return keep;
}

std::vector<Vec> random_points(std::mt19937_64& rng, int count, Index q,
                               bool integer) {
  std::uniform_int_distribution<int> I(0, 4);
  std::vector<Vec> pts;
  for (int i = 0; i < count; ++i) {
    Vec v = testing::uniform_vec(rng, q, -2, 2);
    if (integer) {
      for (Index k = 0; k < q; ++k) v(k) = I(rng);
    }
    pts.push_back(v);
  }
  return pts;
}

TEST(Dominates, Examples) {
  EXPECT_TRUE(dominates(vec({1, 2}), vec({2, 2}), EfficiencyKind::Pareto));
  EXPECT_FALSE(dominates(vec({1, 2}), vec({2, 2}), EfficiencyKind::WeakPareto));
  EXPECT_FALSE(dominates(vec({1, 1}), vec({1, 1}), EfficiencyKind::Pareto));
  EXPECT_FALSE(dominates(vec({1, 1}), vec({1, 1}), EfficiencyKind::WeakPareto));
}

TEST(Dominates, DimensionMismatchThrows) {
  try {
    dominates(vec({1, 2}), vec({1, 2, 3}), EfficiencyKind::Pareto);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(Dominates, ToleranceTreatsNearValuesAsEqual) {
  EXPECT_TRUE(dominates(vec({1, 2}), vec({1.5, 2}), EfficiencyKind::Pareto, 0.1));
  EXPECT_FALSE(dominates(vec({1, 2}), vec({1.05, 2}), EfficiencyKind::Pareto, 0.1));
}

TEST(EffFilter, Examples) {
  std::vector<Vec> pts = {vec({1, 2}), vec({2, 1}), vec({2, 2}), vec({3, 3})};
  auto eff = eff_filter(pts, EfficiencyKind::Pareto);
  ASSERT_EQ(eff.size(), 2u);
  EXPECT_EQ(eff[0], vec({1, 2}));
  EXPECT_EQ(eff[1], vec({2, 1}));
  auto weff = eff_filter(pts, EfficiencyKind::WeakPareto);
  ASSERT_EQ(weff.size(), 3u);
  EXPECT_EQ(weff[2], vec({2, 2}));
  auto single = eff_filter({vec({5})}, EfficiencyKind::Pareto);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0](0), 5.0);
}

TEST(EffFilter, EmptyInputThrows) {
  EXPECT_THROW(eff_filter({}, EfficiencyKind::Pareto), Error);
}

TEST(EffFilter, DuplicatesOfEfficientValuesAreRetained) {
  std::vector<Vec> pts = {vec({1, 2}), vec({1, 2}), vec({2, 3})};
  EXPECT_EQ(eff_filter(pts, EfficiencyKind::Pareto).size(), 2u);
}

TEST(EffFilter, MatchesPairwiseOracleOnRandomSets) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const Index q = 1 + trial % 4;
    auto pts = random_points(rng, 1 + trial % 40, q, trial % 2 == 0);
    for (bool weak : {false, true}) {
      auto kind = weak ? EfficiencyKind::WeakPareto : EfficiencyKind::Pareto;
      EXPECT_EQ(eff_filter_indices(pts, kind), oracle_filter(pts, weak))
          << "trial " << trial << " q " << q;
    }
  }
}

TEST(EffFilterProperties, LawsOnRandomSets) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Index q = 1 + trial % 3;
    auto pts = random_points(rng, 2 + trial % 30, q, trial % 3 == 0);
    auto eff_idx = eff_filter_indices(pts, EfficiencyKind::Pareto);
    auto weff_idx = eff_filter_indices(pts, EfficiencyKind::WeakPareto);
    // Eff is a subset of WEff.
    for (auto i : eff_idx) {
      EXPECT_NE(std::find(weff_idx.begin(), weff_idx.end(), i), weff_idx.end());
    }
    // Idempotence.
    auto eff = eff_filter(pts, EfficiencyKind::Pareto);
    EXPECT_EQ(eff_filter(eff, EfficiencyKind::Pareto), eff);
    // Translation invariance.
    Vec t = testing::uniform_vec(rng, q, -5, 5);
    std::vector<Vec> shifted;
    for (const auto& v : pts) shifted.push_back(v + t);
    auto eff_shift = eff_filter(shifted, EfficiencyKind::Pareto);
    ASSERT_EQ(eff_shift.size(), eff.size());
    for (std::size_t i = 0; i < eff.size(); ++i) {
      EXPECT_EQ(eff_shift[i], eff[i] + t);
    }
    // Positive diagonal scaling selects the same indices.
    Vec scale = testing::uniform_vec(rng, q, 0.5, 3.0);
    std::vector<Vec> scaled;
    for (const auto& v : pts) scaled.push_back(scale.cwiseProduct(v));
    EXPECT_EQ(eff_filter_indices(scaled, EfficiencyKind::Pareto), eff_idx);
    EXPECT_EQ(eff_filter_indices(scaled, EfficiencyKind::WeakPareto), weff_idx);
    // Irreflexivity.
    for (const auto& v : pts) {
      EXPECT_FALSE(dominates(v, v, EfficiencyKind::Pareto));
      EXPECT_FALSE(dominates(v, v, EfficiencyKind::WeakPareto));
    }
  }
}

TEST(EffFilterProperties, ScalarCaseIsArgmin) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    auto pts = random_points(rng, 1 + trial % 20, 1, trial % 2 == 0);
    double lo = pts[0](0);
    for (const auto& v : pts) lo = std::min(lo, v(0));
    for (const auto& v : eff_filter(pts, EfficiencyKind::Pareto)) {
      EXPECT_EQ(v(0), lo);
    }
  }
}

TEST(Weight, RejectsPointsOffTheSimplex) {
  EXPECT_NO_THROW(Weight(vec({0.25, 0.75})));
  EXPECT_THROW(Weight(vec({0.5, 0.6})), Error);
  EXPECT_THROW(Weight(vec({-0.1, 1.1})), Error);
}

TEST(BilevelProblem, MaterialInstanceValidates) {
  auto pb = testing::material_problem();
  EXPECT_NO_THROW(pb.validate());
  EXPECT_TRUE(pb.lower.unshifted());
  pb.lower.B = Mat::Zero(5, 2);
  EXPECT_THROW(pb.validate(), Error);
}

TEST(UpperObjective, GradientOfQuadraticIsExact) {
  QuadraticForm f;
  f.Q = Mat::Identity(2, 2) * 2.0;
  f.c = vec({1, -1});
  f.b = 3;
  Vec z = vec({0.5, 2});
  EXPECT_DOUBLE_EQ(f.value(z), 0.5 * (2 * 0.25 + 2 * 4) + 0.5 - 2 + 3);
  EXPECT_EQ(f.gradient(z), vec({2.0, 3.0}));
}

}  // namespace
}  // namespace mobilevel
