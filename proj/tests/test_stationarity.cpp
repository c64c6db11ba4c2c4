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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mobilevel/oracle.hpp"
#include "mobilevel/stationarity.hpp"

namespace mobilevel::stationarity {
namespace {

using testing::vec;

std::vector<Index> idx(std::initializer_list<Index> v) { return v; }

// p = q = 1: X = {x >= 0}, lower min y over {y >= x, y <= 10}, F = x + y.
BilevelProblem scalar_problem() {
  BilevelProblem pb;
  pb.n = pb.m = pb.p = pb.q = 1;
  Mat A(2, 1), B(2, 1);
  A << 1, 0;
  B << -1, 1;
  pb.lower = LinearLowerLevel::make(Mat::Ones(1, 1), A, B, vec({0, 10}));
  pb.upper_set = {-Mat::Ones(1, 1), vec({0})};
  pb.upper.components = {QuadraticForm{Mat::Zero(2, 2), vec({1, 1}), 0.0}};
  pb.validate();
  return pb;
}

TEST(ActiveSets, MaterialExamples) {
  auto pb = testing::material_problem();
  auto a = detect_active_sets(pb, vec({4, 3}), vec({1, 2}));
  EXPECT_EQ(a.I_G, idx({0, 1}));
  EXPECT_EQ(a.I_g, idx({1, 3}));
  auto b = detect_active_sets(pb, vec({5, 4}), vec({1, 2}));
  EXPECT_TRUE(b.I_G.empty());
  EXPECT_EQ(b.I_g, idx({1, 3}));
}

TEST(ActiveSets, InfeasibleCandidateNamesRows) {
  try {
    detect_active_sets(testing::material_problem(), vec({0, 0}), vec({1, 2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InfeasibleCandidate);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("G[0]"), std::string::npos);
    EXPECT_NE(msg.find("G[1]"), std::string::npos);
  }
}

TEST(Assemble, MaterialShape) {
  auto pb = testing::material_problem();
  auto K = assemble_kkt(pb, vec({4, 3}), vec({1, 2}),
                        detect_active_sets(pb, vec({4, 3}), vec({1, 2})));
  // 2n + m equalities plus the normalization, over p + q + |I_G| + 2|I_g|
  EXPECT_EQ(K.system.E.rows(), 2 * 2 + 2 + 1);
  EXPECT_EQ(K.system.unknowns(), 2 + 2 + 2 + 4);
}

TEST(Assemble, NoActiveRowsForcesZeroGradient) {
  auto pb = testing::material_problem();
  ActiveSets none;
  auto K = assemble_kkt(pb, vec({5, 4}), vec({2, 2.5}), none);
  EXPECT_EQ(K.system.unknowns(), pb.p + pb.q);
  // rows other than the adjoint block involve w* only
  const Mat Jt = pb.upper.jacobian(vec({5, 4}), vec({2, 2.5})).transpose();
  EXPECT_TRUE(K.system.E.block(2, 0, 4, 2).isApprox(Jt));
}

TEST(Certify, MaterialPositive) {
  auto pb = testing::material_problem();
  auto c = certify(pb, vec({4, 3}), vec({1, 2}));
  ASSERT_EQ(c.status, Status::Stationary);
  EXPECT_LE(residuals(pb, vec({4, 3}), vec({1, 2}), c).max(), 1e-8);
  EXPECT_LE((c.w_star - vec({0.5, 0.5})).norm(), 1e-9);
  EXPECT_LE(c.v_star.norm(), 1e-9);
  EXPECT_LE((c.u - vec({0.5, 0.5})).norm(), 1e-9);
  EXPECT_LE(c.v.norm(), 1e-9);
  EXPECT_LE((c.w - vec({0, 0.5, 0, 0.5, 0, 0})).norm(), 1e-9);
}

TEST(Certify, MaterialNegative) {
  auto pb = testing::material_problem();
  auto c = certify(pb, vec({5, 4}), vec({1, 2}));
  ASSERT_EQ(c.status, Status::NotStationary);
  EXPECT_TRUE(verify_refutation(c, 1e-8));
}

TEST(Certify, ScalarCollapse) {
  auto pb = scalar_problem();
  auto c = certify(pb, vec({0}), vec({0}));
  ASSERT_EQ(c.status, Status::Stationary);
  EXPECT_NEAR(c.w_star(0), 1.0, 1e-12);
  EXPECT_NEAR(c.u(0), 2.0, 1e-9);
  EXPECT_LE(residuals(pb, vec({0}), vec({0}), c).max(), 1e-8);
}

TEST(Certify, Deterministic) {
  auto pb = testing::material_problem();
  auto a = certify(pb, vec({4, 3}), vec({1, 2}));
  auto b = certify(pb, vec({4, 3}), vec({1, 2}));
  EXPECT_EQ(a.w.cwiseNotEqual(b.w).count(), 0);
  EXPECT_EQ(a.u.cwiseNotEqual(b.u).count(), 0);
}

TEST(Certify, NearActiveRowsWarn) {
  auto pb = testing::material_problem();
  auto c = certify(pb, vec({4 + 5e-7, 3}), vec({1, 2}));
  ASSERT_FALSE(c.notes.empty());
  EXPECT_NE(c.notes[0].find("near-active"), std::string::npos);
}

TEST(Residuals, Perturbations) {
  auto pb = testing::material_problem();
  auto c = certify(pb, vec({4, 3}), vec({1, 2}));
  auto bumped = c;
  bumped.w_star(0) += 1e-3;
  EXPECT_NEAR(residuals(pb, vec({4, 3}), vec({1, 2}), bumped).normalization, 1e-3, 1e-12);
  auto zero = c;
  zero.w_star.setZero();
  zero.v_star.setZero();
  zero.u.setZero();
  zero.v.setZero();
  zero.w.setZero();
  EXPECT_NEAR(residuals(pb, vec({4, 3}), vec({1, 2}), zero).normalization, 1.0, 1e-15);
}

TEST(Coderivative, MembershipExamples) {
  auto pb = testing::material_problem();
  const Vec x = vec({4, 3}), y = vec({1, 2});
  auto zero = coderivative_Y_member(pb, x, y, vec({0, 0}), vec({0, 0}));
  EXPECT_TRUE(zero.member);
  EXPECT_LE(zero.v.norm(), 1e-12);
  auto e1 = coderivative_Y_member(pb, x, y, vec({1, 0}), vec({0, 0}));
  ASSERT_TRUE(e1.member);
  EXPECT_NEAR(e1.v(1), 1.0, 1e-12);
  EXPECT_FALSE(coderivative_Y_member(pb, x, y, vec({1, 0}), vec({1, 0})).member);
  // -y* = B_act' v needs y* >= 0 here; y* = (-1, 0) is outside the cone
  EXPECT_FALSE(coderivative_Y_member(pb, x, y, vec({-1, 0}), vec({0, 0})).member);
  EXPECT_FALSE(coderivative_Y_member(pb, x, y, vec({-1, 0}), vec({3, -2})).member);
}

TEST(CoderivativeForm, MatchesCertifyOnExamples) {
  auto pb = testing::material_problem();
  auto pos = check_coderivative_form(pb, vec({4, 3}), vec({1, 2}));
  EXPECT_EQ(pos.status, Status::Stationary);
  EXPECT_TRUE(pos.formula_guaranteed);
  EXPECT_LE(residuals(pb, vec({4, 3}), vec({1, 2}), pos).max(), 1e-8);
  auto neg = check_coderivative_form(pb, vec({5, 4}), vec({1, 2}));
  EXPECT_EQ(neg.status, Status::NotStationary);
  EXPECT_TRUE(verify_refutation(neg, 1e-8));
}

TEST(CoderivativeForm, FlagsMfcqFailure) {
  auto pb = testing::material_problem();
  // duplicate the row y1 >= 1 with its opposite: y1 <= 1 makes MFCQ fail
  Mat A(7, 2), B(7, 2);
  Vec d(7);
  A << pb.lower.A, Mat::Zero(1, 2);
  B << pb.lower.B, (Mat(1, 2) << 1, 0).finished();
  d << pb.lower.d, 1;
  pb.lower = LinearLowerLevel::make(pb.lower.C, A, B, d);
  auto c = check_coderivative_form(pb, vec({4, 3}), vec({1, 2}));
  EXPECT_FALSE(c.formula_guaranteed);
  bool flagged = false;
  for (const auto& n : c.notes) flagged = flagged || n.find("formula not guaranteed") == 0;
  EXPECT_TRUE(flagged);
}

using testing::random_candidate;
using testing::random_family_member;

TEST(Properties, CertificateSoundness) {
  std::mt19937_64 rng(17);
  int stationary = 0, refuted = 0;
  for (int trial = 0; trial < 80; ++trial) {
    auto pb = random_family_member(rng);
    auto [x, y] = random_candidate(rng);
    auto c = certify(pb, x, y);
    if (c.status == Status::Stationary) {
      ++stationary;
      EXPECT_LE(residuals(pb, x, y, c).max(), Tolerances{}.cert) << trial;
    } else {
      ++refuted;
      EXPECT_TRUE(verify_refutation(c, Tolerances{}.cert)) << trial;
    }
  }
  EXPECT_GT(stationary, 0);
  EXPECT_GT(refuted, 0);
}

TEST(Properties, CrossFormAgreement) {
  std::mt19937_64 rng(23);
  int compared = 0;
  for (int trial = 0; trial < 80; ++trial) {
    auto pb = random_family_member(rng);
    auto [x, y] = random_candidate(rng);
    if (!cq::check_upper_mfcq(pb, x) || !cq::check_lower_mfcq(pb, x, y)) continue;
    ++compared;
    EXPECT_EQ(certify(pb, x, y).status, check_coderivative_form(pb, x, y).status) << trial;
  }
  EXPECT_GT(compared, 40);
}

TEST(Properties, RowScalingKeepsStatus) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 40; ++trial) {
    auto pb = random_family_member(rng);
    auto [x, y] = random_candidate(rng);
    auto scaled = pb;
    const double s = testing::uniform_vec(rng, 1, 0.1, 10)(0);
    if (trial % 2) {
      const Index i = static_cast<Index>(rng() % 2);
      scaled.upper_set.G.row(i) *= s;
      scaled.upper_set.h(i) *= s;
    } else {
      const Index j = static_cast<Index>(rng() % 6);
      scaled.lower.A.row(j) *= s;
      scaled.lower.B.row(j) *= s;
      scaled.lower.d(j) *= s;
    }
    EXPECT_EQ(certify(pb, x, y).status, certify(scaled, x, y).status) << trial;
  }
}

TEST(Properties, OracleEfficientPointsAreStationary) {
  auto pb = testing::material_problem();
  pb.upper.components[1].c = vec({-0.5, 1, 0, 1});
  oracle::GridSpec grid{vec({4, 3, 1, 2}), vec({6, 5, 4, 3}), 0.25};
  auto pts = oracle::grid_bilevel_efficient(pb, grid, EfficiencyKind::Pareto, 1e-9);
  ASSERT_FALSE(pts.empty());
  for (const auto& p : pts) {
    // points on the grid boundary of x are artefacts of the box, not of X
    if (p.x(0) >= 6 - 1e-12 || p.x(1) >= 5 - 1e-12) continue;
    EXPECT_EQ(certify(pb, p.x, p.y).status, Status::Stationary)
        << p.x.transpose() << " | " << p.y.transpose();
  }
}

TEST(Properties, ScalarSystemIsClassicalKkt) {
  // With p = q = 1 the normalization forces w* = 1 and the x- and y-blocks
  // are the usual bilevel KKT equations.
  auto pb = scalar_problem();
  auto a = detect_active_sets(pb, vec({0}), vec({0}));
  auto K = assemble_kkt(pb, vec({0}), vec({0}), a);
  EXPECT_EQ(K.system.E.row(K.system.E.rows() - 1).head(1)(0), 1.0);
  auto c = certify(pb, vec({0}), vec({0}));
  EXPECT_NEAR(c.w_star(0), 1.0, 1e-12);
  // away from the corner y > x: the adjoint row forces v* = 0 and the
  // y-block cannot balance w* = 1
  EXPECT_EQ(certify(pb, vec({1}), vec({2})).status, Status::NotStationary);
}

}  // namespace
}  // namespace mobilevel::stationarity
