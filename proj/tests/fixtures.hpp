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

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "mobilevel/model.hpp"
#include "mobilevel/polyhedra.hpp"
#include "mobilevel/simplex.hpp"

namespace mobilevel::testing {

inline Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Lower level of the two-variable material example:
//   1 <= y1 <= 4, 2 <= y2 <= 3, y1 <= x1, y2 <= x2, objective (2 y1, y2).
inline LinearLowerLevel material_lower() {
  Mat C(2, 2);
  C << 2, 0, 0, 1;
  Mat A(6, 2);
  A << 0, 0, 0, 0, 0, 0, 0, 0, -1, 0, 0, -1;
  Mat B(6, 2);
  B << 1, 0, -1, 0, 0, 2, 0, -1, 1, 0, 0, 1;
  Vec d(6);
  d << 4, -1, 6, -2, 0, 0;
  return LinearLowerLevel::make(C, A, B, d);
}

// Full bilevel instance with X = [4, inf) x [3, inf) and
// F = (x1 + y1, x2 + y2).
inline BilevelProblem material_problem() {
  BilevelProblem pb;
  pb.n = 2;
  pb.m = 2;
  pb.p = 2;
  pb.q = 2;
  pb.lower = material_lower();
  pb.upper_set.G = -Mat::Identity(2, 2);
  pb.upper_set.h = vec({-4, -3});
  for (int k = 0; k < 2; ++k) {
    QuadraticForm f;
    f.Q = Mat::Zero(4, 4);
    f.c = Vec::Zero(4);
    f.c(k) = 1.0;
    f.c(2 + k) = 1.0;
    pb.upper.components.push_back(f);
  }
  pb.validate();
  return pb;
}

// C = I, Y = [0,1]^2 intersected with y1 + y2 >= 1 (no x dependence).
inline LinearLowerLevel triangle_lower() {
  Mat C = Mat::Identity(2, 2);
  Mat B(5, 2);
  B << 1, 0, -1, 0, 0, 1, 0, -1, -1, -1;
  Vec d(5);
  d << 1, 0, 1, 0, -1;
  return LinearLowerLevel::make(C, Mat::Zero(5, 1), B, d);
}

inline poly::Polyhedron unit_square() {
  return poly::Polyhedron::box(Vec::Zero(2), Vec::Ones(2));
}

inline Vec uniform_vec(std::mt19937_64& rng, Index n, double lo, double hi) {
  std::uniform_real_distribution<double> U(lo, hi);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = U(rng);
  return v;
}

inline Mat uniform_mat(std::mt19937_64& rng, Index r, Index c, double lo,
                       double hi) {
  std::uniform_real_distribution<double> U(lo, hi);
  Mat M(r, c);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) M(i, j) = U(rng);
  }
  return M;
}

// Hausdorff distance between a finite point set and a union of faces. The
// faces are sampled at `step` along each edge for the reverse direction.
inline double hausdorff_to_faces(const std::vector<Vec>& points,
                                 const std::vector<poly::VPolytope>& faces,
                                 double step) {
  double forward = 0.0;
  for (const auto& z : points) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : faces) {
      best = std::min(best, poly::project_vpolytope(z, f).distance);
    }
    forward = std::max(forward, best);
  }
  double backward = 0.0;
  auto nearest = [&](const Vec& z) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : points) best = std::min(best, (p - z).norm());
    return best;
  };
  for (const auto& f : faces) {
    const auto& V = f.vertices;
    if (V.size() == 1) backward = std::max(backward, nearest(V[0]));
    for (std::size_t i = 0; i + 1 < V.size(); ++i) {
      const double len = (V[i + 1] - V[i]).norm();
      const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
      for (int k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) / n;
        backward = std::max(backward, nearest((1 - t) * V[i] + t * V[i + 1]));
      }
    }
  }
  return std::max(forward, backward);
}

// Well-conditioned random bi-objective lower level: the box [-1, 1]^m cut
// by `cuts` halfspaces with unit normals at distance [0.3, 1] from the
// origin, and C rescaled to spectral norm 1. No x dependence (n = 1, A = 0).
inline LinearLowerLevel random_lower(std::mt19937_64& rng, Index m, Index cuts) {
  Mat B(2 * m + cuts, m);
  Vec d(2 * m + cuts);
  B.topRows(m) = Mat::Identity(m, m);
  B.middleRows(m, m) = -Mat::Identity(m, m);
  d.head(2 * m).setOnes();
  for (Index i = 0; i < cuts; ++i) {
    Vec a = uniform_vec(rng, m, -1, 1);
    while (a.norm() < 0.1) a = uniform_vec(rng, m, -1, 1);
    B.row(2 * m + i) = a.normalized().transpose();
    d(2 * m + i) = uniform_vec(rng, 1, 0.3, 1)(0);
  }
  Mat C = uniform_mat(rng, 2, m, -1, 1);
  C /= C.jacobiSvd().singularValues()(0);
  return LinearLowerLevel::make(C, Mat::Zero(B.rows(), 1), B, d);
}

// Bounding box of a bounded polyhedron, from 2m LPs.
inline std::pair<Vec, Vec> bounding_box(const poly::Polyhedron& P) {
  const Index m = P.dim();
  Vec lo(m), hi(m);
  for (Index i = 0; i < m; ++i) {
    Vec c = Vec::Zero(m);
    c(i) = 1;
    lo(i) = poly::lp_solve(c, P).value;
    hi(i) = -poly::lp_solve(-c, P).value;
  }
  return {lo, hi};
}

// Material lower level and X with random linear or convex quadratic F.
inline BilevelProblem random_family_member(std::mt19937_64& rng) {
  auto pb = material_problem();
  const Index p = 1 + static_cast<Index>(rng() % 3);
  pb.p = p;
  pb.upper.components.clear();
  for (Index k = 0; k < p; ++k) {
    QuadraticForm f;
    Mat R = uniform_mat(rng, 4, 4, -1, 1);
    f.Q = (rng() % 2) ? Mat(R.transpose() * R) : Mat(Mat::Zero(4, 4));
    f.c = uniform_vec(rng, 4, -2, 2);
    pb.upper.components.push_back(f);
  }
  pb.validate();
  return pb;
}

// Candidate near the corner so that active sets vary.
inline std::pair<Vec, Vec> random_candidate(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 2);
  Vec x(2), y(2);
  const double xs[] = {4, 4.5, 5};
  const double ys[] = {3, 3.5, 4};
  x << xs[pick(rng)], ys[pick(rng)] - 0.5 * (pick(rng) == 0);
  x(1) = std::max(3.0, x(1));
  const double y1s[] = {1, 2.5, 4};
  const double y2s[] = {2, 2.5, 3};
  y << y1s[pick(rng)], y2s[pick(rng)];
  return {x, y};
}

}  // namespace mobilevel::testing
