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
#include <numeric>
#include <vector>

#include "mobilevel/core.hpp"
#include "mobilevel/simplex.hpp"
#include "mobilevel/tolerances.hpp"

namespace mobilevel::poly {

/// Convex hull of a nonempty finite point list.
struct VPolytope {
  std::vector<Vec> vertices;

  Index dim() const { return vertices.empty() ? 0 : vertices.front().size(); }
  std::size_t size() const { return vertices.size(); }
};

inline constexpr Index kMaxEnumDim = 6;
inline constexpr Index kMaxEnumRows = 24;

/// True iff the recession cone {z : M z <= 0} is {0}. Throws
/// Error(Infeasible) when P is empty.
inline bool is_bounded(const Polyhedron& P, const Tolerances& tol = {}) {
  if (lp_feasible_point(P, tol).status == LpStatus::Infeasible) {
    throw Error(ErrorKind::Infeasible, "is_bounded: polyhedron is empty");
  }
  const Index s = P.dim();
  if (P.rows() == 0) return false;
  // Recession cone intersected with the unit box; a nonzero direction
  // scaled to unit max-norm reaches 1 in some coordinate.
  Polyhedron cone = Polyhedron(P.M, Vec::Zero(P.rows()))
                        .with_rows(Polyhedron::box(Vec::Constant(s, -1.0),
                                                   Vec::Constant(s, 1.0)).M,
                                   Vec::Ones(2 * s));
  for (Index i = 0; i < s; ++i) {
    for (double sg : {1.0, -1.0}) {
      Vec c = Vec::Zero(s);
      c(i) = -sg;
      LpOutcome lp = lp_solve(c, cone, tol);
      if (lp.status == LpStatus::Optimal && -lp.value > 1e-6) return false;
    }
  }
  return true;
}

namespace detail {

inline bool lex_less(const Vec& a, const Vec& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) < b(i);
  }
  return false;
}

template <typename F>
void for_each_subset(Index n, Index k, F&& f) {
  if (k > n) return;
  std::vector<Index> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    f(idx);
    Index i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (Index j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

/// Every vertex of a bounded polyhedron, once each, in lexicographic order.
/// Brute force over all s-subsets of rows; guarded to s <= 6 and r <= 24.
inline std::vector<Vec> vertex_enumerate(const Polyhedron& P,
                                         const Tolerances& tol = {}) {
  const Index s = P.dim();
  const Index r = P.rows();
  if (s > kMaxEnumDim || r > kMaxEnumRows) {
    throw Error(ErrorKind::GuardExceeded,
                "vertex_enumerate: limited to dim <= 6 and rows <= 24");
  }
  if (!is_bounded(P, tol)) {
    throw Error(ErrorKind::Unbounded, "vertex_enumerate: polyhedron is unbounded");
  }
  std::vector<Vec> out;
  detail::for_each_subset(r, s, [&](const std::vector<Index>& rows) {
    Mat Ms(s, s);
    Vec bs(s);
    for (Index i = 0; i < s; ++i) {
      Ms.row(i) = P.M.row(rows[i]);
      bs(i) = P.b(rows[i]);
    }
    Eigen::FullPivLU<Mat> lu(Ms);
    lu.setThreshold(1e-10);
    if (lu.rank() < s) return;
    Vec z = lu.solve(bs);
    const double scale = 1.0 + z.cwiseAbs().maxCoeff();
    if (!P.contains(z, 1e2 * tol.feas * scale)) return;
    for (const auto& v : out) {
      if ((v - z).cwiseAbs().maxCoeff() <= tol.vert * scale) return;
    }
    out.push_back(z);
  });
  std::sort(out.begin(), out.end(), detail::lex_less);
  return out;
}

/// The set of minimizers of c'z over a bounded P, as the hull of the
/// vertices within tol.face of the optimal value.
inline VPolytope optimal_face(const Vec& c, const Polyhedron& P,
                              const Tolerances& tol = {}) {
  LpOutcome lp = lp_solve(c, P, tol);
  if (lp.status == LpStatus::Infeasible) {
    throw Error(ErrorKind::Infeasible, "optimal_face: polyhedron is empty");
  }
  if (lp.status == LpStatus::Unbounded) {
    throw Error(ErrorKind::Unbounded, "optimal_face: objective is unbounded");
  }
  VPolytope face;
  for (auto& v : vertex_enumerate(P, tol)) {
    if (c.dot(v) <= lp.value + tol.face) face.vertices.push_back(std::move(v));
  }
  return face;
}

struct Projection {
  Vec point;
  double distance = 0.0;
  Vec coefficients;  // convex weights over the input vertices
  double gap = 0.0;  // Frank-Wolfe optimality gap at termination
};

/// Nearest point of conv(V) to p in the Euclidean norm. Segments and points
/// are handled in closed form; larger hulls use Wolfe's minimum-norm-point
/// iteration, stopped on its Frank-Wolfe gap.
inline Projection project_vpolytope(const Vec& p, const VPolytope& V,
                                    const Tolerances& tol = {}) {
  if (V.vertices.empty()) throw Error(ErrorKind::EmptyInput, "empty V-polytope");
  const std::size_t nv = V.vertices.size();
  for (const auto& v : V.vertices) {
    require_dims(v.size() == p.size(), "project_vpolytope: dimension mismatch");
  }
  Projection out;
  out.coefficients = Vec::Zero(static_cast<Index>(nv));
  if (nv == 1) {
    out.point = V.vertices[0];
    out.coefficients(0) = 1.0;
    out.distance = (p - out.point).norm();
    return out;
  }
  if (nv == 2) {
    const Vec& a = V.vertices[0];
    const Vec ab = V.vertices[1] - a;
    const double len2 = ab.squaredNorm();
    double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    out.point = a + t * ab;
    out.coefficients << 1.0 - t, t;
    out.distance = (p - out.point).norm();
    return out;
  }

  std::vector<Vec> P;
  P.reserve(nv);
  double scale = 0.0;
  for (const auto& v : V.vertices) {
    P.push_back(v - p);
    scale = std::max(scale, P.back().squaredNorm());
  }
  scale = std::max(scale, 1.0);

  std::vector<std::size_t> S;
  std::vector<double> lam;
  {
    std::size_t best = 0;
    for (std::size_t i = 1; i < nv; ++i) {
      if (P[i].squaredNorm() < P[best].squaredNorm()) best = i;
    }
    S.push_back(best);
    lam.push_back(1.0);
  }
  Vec x = P[S[0]];
  auto combine = [&]() {
    Vec acc = Vec::Zero(p.size());
    for (std::size_t t = 0; t < S.size(); ++t) acc += lam[t] * P[S[t]];
    return acc;
  };

  const int max_outer = 50 * static_cast<int>(nv) + 100;
  double gap = std::numeric_limits<double>::infinity();
  for (int outer = 0; outer < max_outer; ++outer) {
    std::size_t j = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nv; ++i) {
      const double val = x.dot(P[i]);
      if (val < best) {
        best = val;
        j = i;
      }
    }
    gap = x.squaredNorm() - best;
    if (gap <= tol.proj * scale) break;
    if (std::find(S.begin(), S.end(), j) != S.end()) break;
    S.push_back(j);
    lam.push_back(0.0);

    for (int inner = 0; inner < max_outer; ++inner) {
      const Index k = static_cast<Index>(S.size());
      Mat K = Mat::Zero(k + 1, k + 1);
      for (Index a = 0; a < k; ++a) {
        for (Index b = 0; b < k; ++b) K(a, b) = P[S[a]].dot(P[S[b]]);
        K(a, k) = 1.0;
        K(k, a) = 1.0;
      }
      Vec rhs = Vec::Zero(k + 1);
      rhs(k) = 1.0;
      Vec mu = K.colPivHouseholderQr().solve(rhs).head(k);
      if (mu.minCoeff() > 1e-12) {
        for (Index a = 0; a < k; ++a) lam[a] = mu(a);
        x = combine();
        break;
      }
      double theta = 1.0;
      for (Index a = 0; a < k; ++a) {
        if (mu(a) <= 1e-12) {
          const double denom = lam[a] - mu(a);
          if (denom > 0.0) theta = std::min(theta, lam[a] / denom);
        }
      }
      for (Index a = 0; a < k; ++a) lam[a] += theta * (mu(a) - lam[a]);
      std::vector<std::size_t> S2;
      std::vector<double> lam2;
      for (Index a = 0; a < k; ++a) {
        if (lam[a] > 1e-14) {
          S2.push_back(S[a]);
          lam2.push_back(lam[a]);
        }
      }
      if (S2.empty()) {  // numerical breakdown; keep the entering vertex
        S2.push_back(S.back());
        lam2.push_back(1.0);
      }
      const double total = std::accumulate(lam2.begin(), lam2.end(), 0.0);
      for (auto& l : lam2) l /= total;
      S = std::move(S2);
      lam = std::move(lam2);
      x = combine();
    }
  }
  for (std::size_t t = 0; t < S.size(); ++t) {
    out.coefficients(static_cast<Index>(S[t])) = lam[t];
  }
  out.point = p + x;
  out.distance = x.norm();
  out.gap = std::max(0.0, gap);
  return out;
}

struct NnlsResult {
  Vec nu;
  double value = 0.0;
};

/// min over nu >= 0 of |q0 + Mcols nu|_2 by the Lawson-Hanson active-set
/// method (nonnegative least squares with target -q0).
inline NnlsResult nnls_min_norm(const Mat& Mcols, const Vec& q0,
                                const Tolerances& tol = {}) {
  const Index t = Mcols.cols();
  NnlsResult out;
  out.nu = Vec::Zero(t);
  if (t == 0) {
    out.value = q0.norm();
    return out;
  }
  require_dims(Mcols.rows() == q0.size(), "nnls_min_norm: row mismatch");
  const Vec target = -q0;
  const double w_tol =
      tol.nnls * std::max(1.0, Mcols.norm() * std::max(1.0, target.norm()));
  std::vector<char> passive(static_cast<std::size_t>(t), 0);
  Vec& x = out.nu;
  Vec w = Mcols.transpose() * (target - Mcols * x);
  const int max_iter = 3 * static_cast<int>(t) + 30;
  for (int it = 0; it < max_iter; ++it) {
    Index j = -1;
    double wmax = w_tol;
    for (Index i = 0; i < t; ++i) {
      if (!passive[i] && w(i) > wmax) {
        wmax = w(i);
        j = i;
      }
    }
    if (j < 0) break;
    passive[j] = 1;
    for (int inner = 0; inner < max_iter; ++inner) {
      std::vector<Index> ids;
      for (Index i = 0; i < t; ++i) {
        if (passive[i]) ids.push_back(i);
      }
      Mat Ap(Mcols.rows(), static_cast<Index>(ids.size()));
      for (std::size_t a = 0; a < ids.size(); ++a) Ap.col(a) = Mcols.col(ids[a]);
      Vec zp = Ap.colPivHouseholderQr().solve(target);
      Vec z = Vec::Zero(t);
      for (std::size_t a = 0; a < ids.size(); ++a) z(ids[a]) = zp(a);
      bool positive = true;
      for (Index id : ids) positive = positive && z(id) > 0.0;
      if (positive) {
        x = z;
        break;
      }
      double alpha = 1.0;
      for (Index id : ids) {
        if (z(id) <= 0.0) {
          const double denom = x(id) - z(id);
          if (denom > 0.0) alpha = std::min(alpha, x(id) / denom);
        }
      }
      x += alpha * (z - x);
      for (Index id : ids) {
        if (x(id) <= 1e-14) {
          x(id) = 0.0;
          passive[id] = 0;
        }
      }
    }
    w = Mcols.transpose() * (target - Mcols * x);
  }
  x = x.cwiseMax(0.0);
  out.value = (q0 + Mcols * x).norm();
  return out;
}

/// Euclidean projection of p onto the H-polyhedron P, through the least
/// distance program solved as a nonnegative least squares problem.
/// Throws Error(Infeasible) on an empty P.
inline Projection project_polyhedron(const Vec& p, const Polyhedron& P,
                                     const Tolerances& tol = {}) {
  require_dims(p.size() == P.dim(), "project_polyhedron: dimension mismatch");
  Projection out;
  if (P.contains(p, 0.0)) {
    out.point = p;
    return out;
  }
  const Index s = P.dim();
  const Index r = P.rows();
  // min |x| s.t. G x >= h with G = -M, h = M p - b; then z = p + x.
  const Vec h = P.M * p - P.b;
  Mat E(s + 1, r);
  E.topRows(s) = -P.M.transpose();
  E.row(s) = h.transpose();
  Vec f = Vec::Zero(s + 1);
  f(s) = 1.0;
  NnlsResult nn = nnls_min_norm(E, -f, tol);
  const Vec res = E * nn.nu - f;
  if (res.norm() <= 1e-12 || std::abs(res(s)) <= 1e-14) {
    throw Error(ErrorKind::Infeasible, "project_polyhedron: polyhedron is empty");
  }
  const Vec x = -res.head(s) / res(s);
  out.point = p + x;
  out.distance = x.norm();
  return out;
}

}  // namespace mobilevel::poly
