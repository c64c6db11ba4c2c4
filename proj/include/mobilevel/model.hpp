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
#include <string>
#include <vector>

#include "mobilevel/core.hpp"

namespace mobilevel {

/// Which minimality notion a frontier or filter uses. The order cone is
/// always the nonnegative orthant.
enum class EfficiencyKind { Pareto, WeakPareto };

inline std::string_view to_string(EfficiencyKind kind) {
  return kind == EfficiencyKind::Pareto ? "eff" : "weff";
}

/// A point of the unit simplex; used as a scalarization weight.
class Weight {
 public:
  explicit Weight(Vec alpha, double tol = 1e-9) : alpha_(std::move(alpha)) {
    if (alpha_.size() == 0) throw Error(ErrorKind::EmptyInput, "weight");
    if (alpha_.minCoeff() < -tol || std::abs(alpha_.sum() - 1.0) > tol) {
      throw Error(ErrorKind::DimensionMismatch,
                  "weight must lie in the unit simplex");
    }
  }

  /// Normalizes a nonnegative nonzero vector onto the simplex.
  static Weight normalized(const Vec& raw) {
    Vec a = raw.cwiseMax(0.0);
    const double s = a.sum();
    if (!(s > 0.0)) throw Error(ErrorKind::EmptyInput, "zero weight");
    return Weight(a / s);
  }

  const Vec& alpha() const { return alpha_; }
  Index size() const { return alpha_.size(); }

 private:
  Vec alpha_;
};

/// F_k(z) = 1/2 z'Qz + c'z + b over z = (x, y).
struct QuadraticForm {
  Mat Q;
  Vec c;
  double b = 0.0;

  double value(const Vec& z) const { return 0.5 * z.dot(Q * z) + c.dot(z) + b; }
  Vec gradient(const Vec& z) const { return Q * z + c; }
};

struct UpperObjective {
  std::vector<QuadraticForm> components;

  Index p() const { return static_cast<Index>(components.size()); }

  Vec value(const Vec& x, const Vec& y) const {
    Vec z(x.size() + y.size());
    z << x, y;
    Vec out(p());
    for (Index k = 0; k < p(); ++k) out(k) = components[k].value(z);
    return out;
  }

  /// Jacobian with one row per component, columns ordered (x, y).
  Mat jacobian(const Vec& x, const Vec& y) const {
    Vec z(x.size() + y.size());
    z << x, y;
    Mat J(p(), z.size());
    for (Index k = 0; k < p(); ++k) J.row(k) = components[k].gradient(z);
    return J;
  }
};

/// X = {x : G x - h <= 0}.
struct AffineSystem {
  Mat G;
  Vec h;

  Index rows() const { return G.rows(); }
  Vec value(const Vec& x) const { return G * x - h; }
};

/// Lower level: minimize C y + D x + e over {y : A x + B y <= d}.
struct LinearLowerLevel {
  Mat C;
  Mat D;
  Vec e;
  Mat A;
  Mat B;
  Vec d;

  Index n() const { return A.cols(); }
  Index m() const { return B.cols(); }
  Index q() const { return C.rows(); }
  Index k() const { return B.rows(); }

  Vec objective(const Vec& x, const Vec& y) const { return C * y + shift(x); }
  Vec shift(const Vec& x) const { return D * x + e; }
  /// g(x, y) = A x + B y - d.
  Vec constraints(const Vec& x, const Vec& y) const { return A * x + B * y - d; }
  Vec rhs(const Vec& x) const { return d - A * x; }

  // objective C y with no x-dependent shift
  bool unshifted() const {
    return D.isZero(0.0) && e.isZero(0.0);
  }

  /// Builds a lower level with D = 0 and e = 0.
  static LinearLowerLevel make(Mat C, Mat A, Mat B, Vec d) {
    LinearLowerLevel ll;
    ll.D = Mat::Zero(C.rows(), A.cols());
    ll.e = Vec::Zero(C.rows());
    ll.C = std::move(C);
    ll.A = std::move(A);
    ll.B = std::move(B);
    ll.d = std::move(d);
    ll.validate();
    return ll;
  }

  void validate() const {
    require_dims(C.rows() >= 1, "lower.C must have at least one row");
    require_dims(B.cols() >= 1, "lower.B must have at least one column");
    require_dims(C.cols() == B.cols(), "lower.C columns must equal m");
    require_dims(A.rows() == B.rows(), "lower.A and lower.B row counts differ");
    require_dims(d.size() == B.rows(), "lower.d length must equal rows of B");
    require_dims(D.rows() == C.rows() && D.cols() == A.cols(),
                 "lower.D must be q x n");
    require_dims(e.size() == C.rows(), "lower.e length must equal q");
  }
};

struct BilevelProblem {
  Index n = 0;
  Index m = 0;
  Index p = 0;
  Index q = 0;
  UpperObjective upper;
  AffineSystem upper_set;
  LinearLowerLevel lower;

  void validate() const {
    require_dims(n >= 1 && m >= 1 && p >= 1 && q >= 1,
                 "dims must be positive");
    require_dims(upper.p() == p, "upper.F must have p components");
    for (const auto& f : upper.components) {
      require_dims(f.Q.rows() == n + m && f.Q.cols() == n + m,
                   "upper.F[].Q must be (n+m)x(n+m)");
      require_dims(f.c.size() == n + m, "upper.F[].c must have n+m entries");
      require_dims(f.Q.isApprox(f.Q.transpose()) || f.Q.isZero(0.0),
                   "upper.F[].Q must be symmetric");
    }
    require_dims(upper_set.G.cols() == n, "X.G must have n columns");
    require_dims(upper_set.h.size() == upper_set.G.rows(),
                 "X.h length must equal rows of X.G");
    require_dims(lower.A.cols() == n, "lower.A must have n columns");
    require_dims(lower.B.cols() == m, "lower.B must have m columns");
    require_dims(lower.C.rows() == q, "lower.C must have q rows");
    lower.validate();
  }

  bool in_upper_set(const Vec& x, double tol) const {
    return upper_set.rows() == 0 || upper_set.value(x).maxCoeff() <= tol;
  }
};

/// True iff u dominates v: v - u lies in R^q_+ \ {0} (Pareto) or in the
/// interior of R^q_+ (WeakPareto). Differences within tol count as zero.
inline bool dominates(const Vec& u, const Vec& v, EfficiencyKind kind,
                      double tol = 0.0) {
  require_dims(u.size() == v.size(), "dominates: vectors differ in length");
  if (kind == EfficiencyKind::WeakPareto) {
    for (Index i = 0; i < u.size(); ++i) {
      if (!(v(i) - u(i) > tol)) return false;
    }
    return true;
  }
  bool strict = false;
  for (Index i = 0; i < u.size(); ++i) {
    const double diff = v(i) - u(i);
    if (diff < -tol) return false;
    if (diff > tol) strict = true;
  }
  return strict;
}

namespace detail {

inline std::vector<std::size_t> eff_pairwise(const std::vector<Vec>& pts,
                                             EfficiencyKind kind, double tol) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      if (j != i && dominates(pts[j], pts[i], kind, tol)) dominated = true;
    }
    if (!dominated) keep.push_back(i);
  }
  return keep;
}

// Sort-and-sweep filter for two objectives; valid for exact comparisons,
// where dominance is transitive.
inline std::vector<std::size_t> eff_sweep2(const std::vector<Vec>& pts,
                                           EfficiencyKind kind) {
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pts[a](0) != pts[b](0)) return pts[a](0) < pts[b](0);
    return pts[a](1) < pts[b](1);
  });
  std::vector<char> efficient(pts.size(), 0);
  double best_prev = std::numeric_limits<double>::infinity();
  std::size_t g = 0;
  while (g < order.size()) {
    std::size_t end = g;
    while (end < order.size() && pts[order[end]](0) == pts[order[g]](0)) ++end;
    const double group_min = pts[order[g]](1);
    for (std::size_t t = g; t < end; ++t) {
      const double v2 = pts[order[t]](1);
      efficient[order[t]] = kind == EfficiencyKind::Pareto
                                ? (v2 < best_prev && v2 == group_min)
                                : !(best_prev < v2);
    }
    best_prev = std::min(best_prev, group_min);
    g = end;
  }
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (efficient[i]) keep.push_back(i);
  }
  return keep;
}

}  // namespace detail

/// Indices (in input order) of the points not dominated by any other point.
inline std::vector<std::size_t> eff_filter_indices(const std::vector<Vec>& pts,
                                                   EfficiencyKind kind,
                                                   double tol = 0.0) {
  if (pts.empty()) throw Error(ErrorKind::EmptyInput, "eff_filter: no points");
  const Index q = pts.front().size();
  for (const auto& v : pts) {
    require_dims(v.size() == q, "eff_filter: points differ in length");
  }
  if (q == 2 && tol == 0.0) return detail::eff_sweep2(pts, kind);
  if (q == 1) {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& v : pts) lo = std::min(lo, v(0));
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!(pts[i](0) - lo > tol)) keep.push_back(i);
    }
    return keep;
  }
  return detail::eff_pairwise(pts, kind, tol);
}

inline std::vector<Vec> eff_filter(const std::vector<Vec>& pts,
                                   EfficiencyKind kind, double tol = 0.0) {
  std::vector<Vec> out;
  for (std::size_t i : eff_filter_indices(pts, kind, tol)) out.push_back(pts[i]);
  return out;
}

}  // namespace mobilevel
