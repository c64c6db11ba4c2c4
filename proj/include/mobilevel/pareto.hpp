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
#include <vector>

#include "mobilevel/core.hpp"
#include "mobilevel/model.hpp"
#include "mobilevel/oracle.hpp"
#include "mobilevel/polyhedra.hpp"
#include "mobilevel/tolerances.hpp"

namespace mobilevel::pareto {

using poly::Polyhedron;
using poly::VPolytope;

/// The frontier Phi(x) in objective space. For two objectives the faces are
/// the chain of segments between consecutive extreme points (or a single
/// point), each generated by the weight stored alongside it.
struct ParetoFront {
  EfficiencyKind kind = EfficiencyKind::Pareto;
  std::vector<VPolytope> faces;
  std::vector<Weight> weights;
  std::vector<Vec> vertices;  // extreme points in chain order
  bool approximate = false;   // grid-based (three or more objectives)
};

/// S(x) as a union of optimal faces of weighted-sum problems.
struct EfficientSet {
  std::vector<VPolytope> faces;
  std::vector<Weight> weights;
  bool approximate = false;
};

struct FrontOptions {
  double approx_grid_step = 0.0;  // 0 picks 1/50 of the widest extent
};

/// Y(x) = {y : B y <= d - A x}.
inline Polyhedron feasible_set(const LinearLowerLevel& ll, const Vec& x) {
  require_dims(x.size() == ll.n(), "feasible_set: x has wrong length");
  return {ll.B, ll.rhs(x)};
}

namespace detail {

inline void require_bounded_nonempty(const Polyhedron& Y, const Tolerances& tol) {
  bool bounded = false;
  try {
    bounded = poly::is_bounded(Y, tol);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Infeasible) {
      throw Error(ErrorKind::Infeasible, "lower-level feasible set is empty");
    }
    throw;
  }
  if (!bounded) {
    throw Error(ErrorKind::Unbounded, "lower-level feasible set is unbounded");
  }
}

inline poly::LpOutcome solve_or_throw(const Vec& c, const Polyhedron& P,
                                      const Tolerances& tol) {
  auto lp = poly::lp_solve(c, P, tol);
  if (lp.status != poly::LpStatus::Optimal) {
    throw Error(lp.status == poly::LpStatus::Infeasible ? ErrorKind::Infeasible
                                                         : ErrorKind::Unbounded,
                "scalarized lower-level problem has no minimizer");
  }
  return lp;
}

// Minimizes objective `first`, then objective `second` over the optimal set
// of the first stage. Returns the minimizer.
inline Vec lexicographic_min(const Mat& C, const Polyhedron& Y, Index first,
                             Index second, const Tolerances& tol) {
  auto lp1 = solve_or_throw(C.row(first).transpose(), Y, tol);
  const double cap = lp1.value + tol.opt * (1.0 + std::abs(lp1.value));
  Polyhedron Y2 = Y.with_rows(C.row(first), Vec::Constant(1, cap));
  auto lp2 = solve_or_throw(C.row(second).transpose(), Y2, tol);
  return lp2.minimizer;
}

inline double cross(const Vec& a, const Vec& b) { return a(0) * b(1) - a(1) * b(0); }

// Chord-normal weight of two image points with a(0) < b(0), a(1) > b(1).
inline Vec chord_normal(const Vec& a, const Vec& b) {
  Vec raw(2);
  raw << a(1) - b(1), b(0) - a(0);
  return raw / raw.sum();
}

struct Chain {
  std::vector<Vec> points;  // unshifted images C y, increasing first coordinate
  std::vector<Vec> edge_weights;
  Vec left_y;
  Vec right_y;
};

// Extreme supported points of C(Y) for two objectives by dichotomic search.
inline Chain biobjective_chain(const Mat& C, const Polyhedron& Y,
                               const Tolerances& tol) {
  Chain chain;
  chain.left_y = lexicographic_min(C, Y, 0, 1, tol);
  chain.right_y = lexicographic_min(C, Y, 1, 0, tol);
  const Vec zl = C * chain.left_y;
  const Vec zr = C * chain.right_y;
  const double scale = 1.0 + std::max(zl.cwiseAbs().maxCoeff(), zr.cwiseAbs().maxCoeff());
  if ((zl - zr).cwiseAbs().maxCoeff() <= tol.face * scale ||
      !(zl(0) < zr(0) && zl(1) > zr(1))) {
    chain.points = {zl};
    return chain;
  }
  // Iterative in-order recursion over chords.
  std::vector<Vec> points = {zl};
  std::vector<std::pair<Vec, Vec>> stack = {{zl, zr}};
  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    const Vec alpha = chord_normal(a, b);
    const Vec c = C.transpose() * alpha;
    auto lp = solve_or_throw(c, Y, tol);
    const double chord = alpha.dot(a);
    const Vec z = C * lp.minimizer;
    const bool improves = lp.value < chord - tol.opt * (1.0 + std::abs(chord)) &&
                          z(0) > a(0) && z(0) < b(0);
    if (improves) {
      // Process (a, z) first, then (z, b).
      stack.push_back({z, b});
      stack.push_back({a, z});
    } else {
      points.push_back(b);
    }
  }
  // Drop near-duplicates and points interior to a straight run.
  std::vector<Vec> merged;
  for (const auto& z : points) {
    if (!merged.empty() &&
        (merged.back() - z).cwiseAbs().maxCoeff() <= tol.vert * scale) {
      continue;
    }
    merged.push_back(z);
    while (merged.size() >= 3) {
      const Vec& p0 = merged[merged.size() - 3];
      const Vec& p1 = merged[merged.size() - 2];
      const Vec& p2 = merged[merged.size() - 1];
      const Vec u = p1 - p0;
      const Vec v = p2 - p1;
      if (std::abs(cross(u, v)) <= 1e-9 * u.norm() * v.norm()) {
        merged.erase(merged.end() - 2);
      } else {
        break;
      }
    }
  }
  chain.points = merged;
  for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
    chain.edge_weights.push_back(chord_normal(merged[i], merged[i + 1]));
  }
  return chain;
}

inline oracle::GridSpec approx_grid(const Polyhedron& Y, const FrontOptions& opts,
                                    const Tolerances& tol) {
  const Index m = Y.dim();
  Vec lo(m), hi(m);
  for (Index i = 0; i < m; ++i) {
    Vec c = Vec::Zero(m);
    c(i) = 1.0;
    lo(i) = solve_or_throw(c, Y, tol).value;
    hi(i) = -solve_or_throw(-c, Y, tol).value;
  }
  double h = opts.approx_grid_step;
  if (!(h > 0.0)) h = std::max((hi - lo).maxCoeff(), 1e-6) / 50.0;
  return {lo, hi, h, oracle::kDefaultGridCap};
}

inline std::vector<Vec> vertices_with_image(const Mat& C, const Polyhedron& Y,
                                            const Vec& z, const Tolerances& tol) {
  std::vector<Vec> out;
  const double scale = 1.0 + z.cwiseAbs().maxCoeff();
  for (auto& v : poly::vertex_enumerate(Y, tol)) {
    if ((C * v - z).cwiseAbs().maxCoeff() <= tol.face * scale) out.push_back(std::move(v));
  }
  return out;
}

inline bool face_contains(const VPolytope& outer, const VPolytope& inner, double tol) {
  for (const auto& v : inner.vertices) {
    bool found = false;
    for (const auto& w : outer.vertices) {
      if ((v - w).cwiseAbs().maxCoeff() <= tol * (1.0 + v.cwiseAbs().maxCoeff())) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

inline Weight corner_weight(Index which, double eps) {
  Vec a(2);
  if (which == 0) {
    a << 1.0 - eps, eps;
  } else {
    a << eps, 1.0 - eps;
  }
  return Weight(a);
}

}  // namespace detail

/// Phi(x): efficient (or weakly efficient) objective values of the lower
/// level at x. Exact for one and two objectives; three or more objectives
/// fall back to a grid approximation flagged `approximate`.
inline ParetoFront frontier_map(const LinearLowerLevel& ll, const Vec& x,
                                EfficiencyKind kind = EfficiencyKind::Pareto,
                                const Tolerances& tol = {},
                                const FrontOptions& opts = {}) {
  const Polyhedron Y = feasible_set(ll, x);
  detail::require_bounded_nonempty(Y, tol);
  const Vec shift = ll.shift(x);
  ParetoFront front;
  front.kind = kind;

  if (ll.q() == 1) {
    auto lp = detail::solve_or_throw(ll.C.row(0).transpose(), Y, tol);
    Vec z = Vec::Constant(1, lp.value) + shift;
    front.vertices = {z};
    front.faces = {VPolytope{{z}}};
    front.weights = {Weight(Vec::Ones(1))};
    return front;
  }

  if (ll.q() >= 3) {
    auto grid = detail::approx_grid(Y, opts, tol);
    auto g = oracle::grid_front(ll, x, grid, kind, tol);
    front.approximate = true;
    front.vertices = g.points;
    for (const auto& z : g.points) front.faces.push_back(VPolytope{{z}});
    return front;
  }

  const auto chain = detail::biobjective_chain(ll.C, Y, tol);
  for (const auto& z : chain.points) front.vertices.push_back(z + shift);
  if (front.vertices.size() == 1) {
    front.faces = {VPolytope{{front.vertices[0]}}};
    front.weights = {detail::corner_weight(0, tol.lex)};
  } else {
    for (std::size_t i = 0; i + 1 < front.vertices.size(); ++i) {
      front.faces.push_back(VPolytope{{front.vertices[i], front.vertices[i + 1]}});
      front.weights.emplace_back(chain.edge_weights[i]);
    }
  }

  if (kind == EfficiencyKind::WeakPareto) {
    // Flat extensions: the far end of the first-objective-optimal face and
    // of the second-objective-optimal face.
    const Vec zl = chain.points.front();
    const Vec zr = chain.points.back();
    const double cap_l = zl(0) + tol.opt * (1.0 + std::abs(zl(0)));
    auto top = detail::solve_or_throw(-ll.C.row(1).transpose(),
                                      Y.with_rows(ll.C.row(0), Vec::Constant(1, cap_l)), tol);
    const double top2 = -top.value;
    const double cap_r = zr(1) + tol.opt * (1.0 + std::abs(zr(1)));
    auto right = detail::solve_or_throw(-ll.C.row(0).transpose(),
                                        Y.with_rows(ll.C.row(1), Vec::Constant(1, cap_r)), tol);
    const double right1 = -right.value;
    if (top2 > zl(1) + tol.face * (1.0 + std::abs(zl(1)))) {
      Vec end(2);
      end << zl(0), top2;
      end += shift;
      front.faces.insert(front.faces.begin(), VPolytope{{end, front.vertices.front()}});
      front.weights.insert(front.weights.begin(), Weight((Vec(2) << 1.0, 0.0).finished()));
      front.vertices.insert(front.vertices.begin(), end);
    }
    if (right1 > zr(0) + tol.face * (1.0 + std::abs(zr(0)))) {
      Vec end(2);
      end << right1, zr(1);
      end += shift;
      front.faces.push_back(VPolytope{{front.vertices.back(), end}});
      front.weights.emplace_back((Vec(2) << 0.0, 1.0).finished());
      front.vertices.push_back(end);
    }
  }
  return front;
}

/// S(x) as the union of optimal faces of the weights found by the
/// dichotomic search, plus the lexicographic corner faces. Faces contained
/// in another face are dropped.
inline EfficientSet efficient_set(const LinearLowerLevel& ll, const Vec& x,
                                  const Tolerances& tol = {},
                                  const FrontOptions& opts = {}) {
  const Polyhedron Y = feasible_set(ll, x);
  detail::require_bounded_nonempty(Y, tol);
  EfficientSet out;

  if (ll.q() == 1) {
    out.faces = {poly::optimal_face(ll.C.row(0).transpose(), Y, tol)};
    out.weights = {Weight(Vec::Ones(1))};
    return out;
  }

  if (ll.q() >= 3) {
    auto grid = detail::approx_grid(Y, opts, tol);
    auto g = oracle::grid_front(ll, x, grid, EfficiencyKind::Pareto, tol);
    out.approximate = true;
    for (const auto& y : g.preimages) out.faces.push_back(VPolytope{{y}});
    return out;
  }

  const auto chain = detail::biobjective_chain(ll.C, Y, tol);
  std::vector<VPolytope> faces;
  std::vector<Weight> weights;
  for (const auto& alpha : chain.edge_weights) {
    faces.push_back(poly::optimal_face(ll.C.transpose() * alpha, Y, tol));
    weights.emplace_back(alpha);
  }
  faces.push_back(VPolytope{detail::vertices_with_image(ll.C, Y, chain.points.front(), tol)});
  weights.push_back(detail::corner_weight(0, tol.lex));
  faces.push_back(VPolytope{detail::vertices_with_image(ll.C, Y, chain.points.back(), tol)});
  weights.push_back(detail::corner_weight(1, tol.lex));

  for (std::size_t i = 0; i < faces.size(); ++i) {
    if (faces[i].vertices.empty()) continue;
    bool covered = false;
    for (const auto& kept : out.faces) {
      if (detail::face_contains(kept, faces[i], tol.vert)) {
        covered = true;
        break;
      }
    }
    if (covered) continue;
    for (std::size_t j = out.faces.size(); j-- > 0;) {
      if (detail::face_contains(faces[i], out.faces[j], tol.vert)) {
        out.faces.erase(out.faces.begin() + static_cast<std::ptrdiff_t>(j));
        out.weights.erase(out.weights.begin() + static_cast<std::ptrdiff_t>(j));
      }
    }
    out.faces.push_back(faces[i]);
    out.weights.push_back(weights[i]);
  }
  return out;
}

/// Smallest Euclidean distance from z to the union of the faces.
inline double distance_to_faces(const std::vector<VPolytope>& faces, const Vec& z,
                                const Tolerances& tol = {}) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : faces) {
    best = std::min(best, poly::project_vpolytope(z, f, tol).distance);
  }
  return best;
}

inline double distance_to_front(const ParetoFront& front, const Vec& z,
                                const Tolerances& tol = {}) {
  return distance_to_faces(front.faces, z, tol);
}

/// d(z, Phi(x)).
inline double distance_to_front(const LinearLowerLevel& ll, const Vec& x,
                                const Vec& z,
                                EfficiencyKind kind = EfficiencyKind::Pareto,
                                const Tolerances& tol = {}) {
  require_dims(z.size() == ll.q(), "distance_to_front: z has wrong length");
  return distance_to_front(frontier_map(ll, x, kind, tol), z, tol);
}

/// d(y, S(x)).
inline double distance_to_solution_set(const LinearLowerLevel& ll, const Vec& x,
                                       const Vec& y, const Tolerances& tol = {}) {
  require_dims(y.size() == ll.m(), "distance_to_solution_set: y has wrong length");
  return distance_to_faces(efficient_set(ll, x, tol).faces, y, tol);
}

/// y in Y(x) and f(x, y) within `dist_tol` of Phi(x). Both tests are
/// relative to the magnitude of the point (1 + |.|_inf).
inline bool is_efficient_point(const LinearLowerLevel& ll, const Vec& x,
                               const Vec& y,
                               EfficiencyKind kind = EfficiencyKind::Pareto,
                               double dist_tol = 1e-7, const Tolerances& tol = {}) {
  require_dims(y.size() == ll.m(), "is_efficient_point: y has wrong length");
  const Polyhedron Y = feasible_set(ll, x);
  if (!Y.contains(y, tol.feas * (1.0 + y.lpNorm<Eigen::Infinity>()))) return false;
  const Vec z = ll.objective(x, y);
  return distance_to_front(ll, x, z, kind, tol) <= dist_tol * (1.0 + z.lpNorm<Eigen::Infinity>());
}

}  // namespace mobilevel::pareto
