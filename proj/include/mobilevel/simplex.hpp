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
#include "mobilevel/tolerances.hpp"

namespace mobilevel::poly {

/// {z in R^s : M z <= b}. Rows may be redundant; emptiness is a property
/// of the set, not a construction error.
struct Polyhedron {
  Mat M;
  Vec b;

  Polyhedron() = default;
  Polyhedron(Mat m, Vec rhs) : M(std::move(m)), b(std::move(rhs)) {
    require_dims(M.rows() == b.size(), "polyhedron: rows of M and b differ");
    require_dims(M.cols() >= 1, "polyhedron: dimension must be >= 1");
  }

  Index dim() const { return M.cols(); }
  Index rows() const { return M.rows(); }

  /// Largest constraint violation max_i (M z - b)_i, or -inf with no rows.
  double violation(const Vec& z) const {
    if (rows() == 0) return -std::numeric_limits<double>::infinity();
    return (M * z - b).maxCoeff();
  }

  bool contains(const Vec& z, double tol) const { return violation(z) <= tol; }

  static Polyhedron box(const Vec& lo, const Vec& hi) {
    require_dims(lo.size() == hi.size(), "box: bound lengths differ");
    const Index s = lo.size();
    Mat M(2 * s, s);
    M << Mat::Identity(s, s), -Mat::Identity(s, s);
    Vec b(2 * s);
    b << hi, -lo;
    return {M, b};
  }

  /// Appends the rows of another system over the same space.
  Polyhedron with_rows(const Mat& extra_M, const Vec& extra_b) const {
    require_dims(extra_M.cols() == dim(), "with_rows: column count differs");
    Mat M2(rows() + extra_M.rows(), dim());
    M2 << M, extra_M;
    Vec b2(b.size() + extra_b.size());
    b2 << b, extra_b;
    return {M2, b2};
  }
};

enum class LpStatus { Optimal, Unbounded, Infeasible };

inline std::string_view to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  // Optimal
  Vec minimizer;
  double value = std::numeric_limits<double>::quiet_NaN();
  Vec duals;                  // lambda >= 0 with c + M' lambda = 0
  std::vector<Index> basis;   // basic columns of the standard form
  std::vector<Index> active;  // rows tight at the minimizer
  // Unbounded: M r <= 0, c'r < 0, |r|_inf = 1
  Vec ray;
  // Infeasible: lambda >= 0, lambda'M = 0, lambda'b < 0, |lambda|_inf = 1
  Vec farkas;
  Index iterations = 0;
};

/// Farkas certificate check: lambda >= 0, |lambda'M|_inf <= tol, lambda'b < 0.
inline bool verify_farkas(const Polyhedron& P, const Vec& lambda, double tol) {
  if (lambda.size() != P.rows() || lambda.size() == 0) return false;
  if (lambda.minCoeff() < -tol) return false;
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  return (P.M.transpose() * lambda).cwiseAbs().maxCoeff() <= tol * scale &&
         lambda.dot(P.b) < 0.0;
}

inline bool verify_ray(const Vec& c, const Polyhedron& P, const Vec& r,
                       double tol) {
  if (r.size() != P.dim()) return false;
  const bool recession = P.rows() == 0 || (P.M * r).maxCoeff() <= tol;
  return recession && c.dot(r) < 0.0;
}

namespace detail {

// Dense two-phase tableau over the standard form
//   [M, -M, I] (z+, z-, s) = b,  all >= 0,
// with rows of negative right-hand side negated and given an artificial.
class SimplexTableau {
 public:
  SimplexTableau(const Polyhedron& P, const Tolerances& tol)
      : s_(P.dim()), r_(P.rows()), tol_(tol) {
    sign_.resize(r_);
    art_of_row_.assign(r_, -1);
    Index n_art = 0;
    for (Index i = 0; i < r_; ++i) {
      sign_[i] = P.b(i) < 0.0 ? -1.0 : 1.0;
      if (sign_[i] < 0) art_of_row_[i] = n_art++;
    }
    n_cols_ = 2 * s_ + r_ + n_art;
    first_art_ = 2 * s_ + r_;
    A_ = Mat::Zero(r_, n_cols_);
    rhs0_ = Vec(r_);
    for (Index i = 0; i < r_; ++i) {
      const double sg = sign_[i];
      A_.row(i).segment(0, s_) = sg * P.M.row(i);
      A_.row(i).segment(s_, s_) = -sg * P.M.row(i);
      A_(i, 2 * s_ + i) = sg;
      if (art_of_row_[i] >= 0) A_(i, first_art_ + art_of_row_[i]) = 1.0;
      rhs0_(i) = sg * P.b(i);
    }
    T_ = A_;
    rhs_ = rhs0_;
    basis_.resize(r_);
    for (Index i = 0; i < r_; ++i) {
      basis_[i] = art_of_row_[i] >= 0 ? first_art_ + art_of_row_[i]
                                      : 2 * s_ + i;
    }
    const double cap = tol.max_iter > 0
                           ? tol.max_iter
                           : std::max<double>(1000.0, 50.0 * double(r_ + n_cols_));
    max_iter_ = static_cast<Index>(cap);
    pivot_eps_ = 1e-10;
  }

  Index cols() const { return n_cols_; }
  Index iterations() const { return iterations_; }
  const std::vector<Index>& basis() const { return basis_; }

  // Phase 1: returns the minimal sum of artificials.
  double phase_one() {
    Vec cost = Vec::Zero(n_cols_);
    for (Index j = first_art_; j < n_cols_; ++j) cost(j) = 1.0;
    Index unused = -1;
    run(cost, n_cols_, unused);
    return current_value(cost);
  }

  // Pivots artificial columns out of the basis where a nonzero entry allows.
  void drive_out_artificials() {
    for (Index i = 0; i < r_; ++i) {
      if (basis_[i] < first_art_) continue;
      for (Index j = 0; j < first_art_; ++j) {
        if (std::abs(T_(i, j)) > 1e-9) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  // Phase 2 over the non-artificial columns. Returns the entering column of
  // an unbounded direction, or -1 on optimality.
  Index phase_two(const Vec& c) {
    Vec cost = Vec::Zero(n_cols_);
    cost.segment(0, s_) = c;
    cost.segment(s_, s_) = -c;
    Index unbounded_col = -1;
    run(cost, first_art_, unbounded_col);
    return unbounded_col;
  }

  // Basic solution recomputed from the original standard-form data.
  Vec basic_solution() const {
    Vec x = Vec::Zero(n_cols_);
    if (r_ == 0) return x;
    Vec xb = basis_matrix().fullPivLu().solve(rhs0_);
    for (Index i = 0; i < r_; ++i) x(basis_[i]) = xb(i);
    return x;
  }

  // y with B'y = c_B for the given cost, mapped back to original row signs.
  Vec row_duals(const Vec& cost) const {
    if (r_ == 0) return Vec(0);
    Vec cb(r_);
    for (Index i = 0; i < r_; ++i) cb(i) = cost(basis_[i]);
    Vec y = basis_matrix().transpose().fullPivLu().solve(cb);
    for (Index i = 0; i < r_; ++i) y(i) *= sign_[i];
    return y;
  }

  // Direction of the standard-form variables along an unbounded column.
  Vec direction(Index col) const {
    Vec dx = Vec::Zero(n_cols_);
    dx(col) = 1.0;
    if (r_ == 0) return dx;
    Vec db = basis_matrix().fullPivLu().solve(A_.col(col));
    for (Index i = 0; i < r_; ++i) dx(basis_[i]) -= db(i);
    return dx;
  }

  Vec to_original(const Vec& x) const {
    return x.segment(0, s_) - x.segment(s_, s_);
  }

  Vec phase_one_cost() const {
    Vec cost = Vec::Zero(n_cols_);
    for (Index j = first_art_; j < n_cols_; ++j) cost(j) = 1.0;
    return cost;
  }

 private:
  Mat basis_matrix() const {
    Mat Bm(r_, r_);
    for (Index i = 0; i < r_; ++i) Bm.col(i) = A_.col(basis_[i]);
    return Bm;
  }

  double current_value(const Vec& cost) const {
    double v = 0.0;
    for (Index i = 0; i < r_; ++i) v += cost(basis_[i]) * rhs_(i);
    return v;
  }

  void pivot(Index row, Index col) {
    const double piv = T_(row, col);
    T_.row(row) /= piv;
    rhs_(row) /= piv;
    for (Index i = 0; i < r_; ++i) {
      if (i == row) continue;
      const double f = T_(i, col);
      if (f != 0.0) {
        T_.row(i) -= f * T_.row(row);
        rhs_(i) -= f * rhs_(row);
        T_(i, col) = 0.0;
      }
    }
    basis_[row] = col;
  }

  // Bland's rule: lowest-index improving column, ratio ties broken by the
  // lowest basic index.
  void run(const Vec& cost, Index allowed_cols, Index& unbounded_col) {
    const double dual_eps = 1e-10 * (1.0 + cost.cwiseAbs().maxCoeff());
    while (true) {
      Vec cb(r_);
      for (Index i = 0; i < r_; ++i) cb(i) = cost(basis_[i]);
      Index enter = -1;
      for (Index j = 0; j < allowed_cols; ++j) {
        if (is_basic(j)) continue;
        double reduced = cost(j);
        for (Index i = 0; i < r_; ++i) reduced -= cb(i) * T_(i, j);
        if (reduced < -dual_eps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return;
      Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < r_; ++i) {
        if (T_(i, enter) <= pivot_eps_) continue;
        const double ratio = std::max(0.0, rhs_(i)) / T_(i, enter);
        const double slack = 1e-12 * (1.0 + std::abs(best));
        if (leave < 0 || ratio < best - slack) {
          best = ratio;
          leave = i;
        } else if (ratio <= best + slack && basis_[i] < basis_[leave]) {
          leave = i;
        }
      }
      if (leave < 0) {
        unbounded_col = enter;
        return;
      }
      pivot(leave, enter);
      if (++iterations_ > max_iter_) {
        throw Error(ErrorKind::IterationLimit,
                    "simplex exceeded " + std::to_string(max_iter_) + " pivots");
      }
    }
  }

  bool is_basic(Index j) const {
    return std::find(basis_.begin(), basis_.end(), j) != basis_.end();
  }

  Index s_;
  Index r_;
  Index n_cols_ = 0;
  Index first_art_ = 0;
  Tolerances tol_;
  std::vector<double> sign_;
  std::vector<Index> art_of_row_;
  Mat A_;
  Vec rhs0_;
  Mat T_;
  Vec rhs_;
  std::vector<Index> basis_;
  Index iterations_ = 0;
  Index max_iter_ = 0;
  double pivot_eps_ = 1e-10;
};

}  // namespace detail

/// Minimizes c'z over P with a two-phase primal simplex under Bland's rule.
/// Deterministic for identical input. Throws Error(IterationLimit) when the
/// pivot cap is reached and Error(DimensionMismatch) on inconsistent sizes.
inline LpOutcome lp_solve(const Vec& c, const Polyhedron& P,
                          const Tolerances& tol = {}) {
  require_dims(c.size() == P.dim(), "lp_solve: cost length differs from dim");
  require_dims(P.M.rows() == P.b.size(), "lp_solve: rows of M and b differ");
  detail::SimplexTableau tab(P, tol);
  LpOutcome out;

  const double infeas = tab.phase_one();
  const double b_scale = 1.0 + (P.rows() ? P.b.cwiseAbs().maxCoeff() : 0.0);
  if (infeas > tol.feas * b_scale) {
    Vec y = tab.row_duals(tab.phase_one_cost());
    Vec lambda = -y;
    lambda = lambda.unaryExpr([](double v) { return std::abs(v) < 1e-13 ? 0.0 : v; });
    const double norm = lambda.cwiseAbs().maxCoeff();
    if (norm > 0) lambda /= norm;
    out.status = LpStatus::Infeasible;
    out.farkas = lambda;
    out.iterations = tab.iterations();
    return out;
  }
  tab.drive_out_artificials();
  const Index unbounded_col = tab.phase_two(c);
  out.iterations = tab.iterations();
  if (unbounded_col >= 0) {
    Vec r = tab.to_original(tab.direction(unbounded_col));
    const double norm = r.cwiseAbs().maxCoeff();
    if (norm > 0) r /= norm;
    out.status = LpStatus::Unbounded;
    out.ray = r;
    return out;
  }
  const Vec x = tab.basic_solution();
  out.status = LpStatus::Optimal;
  out.minimizer = tab.to_original(x);
  out.value = c.dot(out.minimizer);
  Vec cost = Vec::Zero(tab.cols());
  cost.segment(0, P.dim()) = c;
  cost.segment(P.dim(), P.dim()) = -c;
  out.duals = (-tab.row_duals(cost)).cwiseMax(0.0);
  out.basis = tab.basis();
  if (P.rows() > 0) {
    const Vec slack = P.b - P.M * out.minimizer;
    for (Index i = 0; i < P.rows(); ++i) {
      if (std::abs(slack(i)) <= tol.act * (1.0 + std::abs(P.b(i)))) {
        out.active.push_back(i);
      }
    }
  }
  return out;
}

/// Feasibility probe: returns a point of P, or the infeasible outcome.
inline LpOutcome lp_feasible_point(const Polyhedron& P, const Tolerances& tol = {}) {
  return lp_solve(Vec::Zero(P.dim()), P, tol);
}

}  // namespace mobilevel::poly
