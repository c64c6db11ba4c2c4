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
#include <optional>
#include <string>
#include <vector>

#include "mobilevel/core.hpp"
#include "mobilevel/model.hpp"
#include "mobilevel/polyhedra.hpp"
#include "mobilevel/tolerances.hpp"

// Brute-force ground truth on regular grids. Nothing here calls the exact
// frontier code; the only shared dependency is eff_filter.
namespace mobilevel::oracle {

inline constexpr std::size_t kDefaultGridCap = 10'000'000;

/// Regular grid lower + k h over a box, k = 0, 1, ... while inside.
struct GridSpec {
  Vec lower;
  Vec upper;
  double h = 0.1;
  std::size_t cap = kDefaultGridCap;
  // Also sample the exact points where lattice lines leave the feasible set.
  bool boundary_points = true;

  Index dim() const { return lower.size(); }

  std::vector<Index> counts() const {
    require_dims(lower.size() == upper.size() && lower.size() > 0,
                 "grid: bound lengths differ");
    if (!(h > 0.0) || !std::isfinite(h)) {
      throw Error(ErrorKind::Parse, "grid: step must be positive and finite");
    }
    std::vector<Index> n(static_cast<std::size_t>(dim()));
    for (Index i = 0; i < dim(); ++i) {
      if (!std::isfinite(lower(i)) || !std::isfinite(upper(i)) ||
          upper(i) < lower(i)) {
        throw Error(ErrorKind::Parse, "grid: bounds must be finite and ordered");
      }
      n[i] = static_cast<Index>(std::floor((upper(i) - lower(i)) / h + 1e-9)) + 1;
    }
    return n;
  }

  std::size_t count() const {
    double total = 1.0;
    for (Index c : counts()) total *= static_cast<double>(c);
    return total > 1e18 ? std::numeric_limits<std::size_t>::max()
                        : static_cast<std::size_t>(total);
  }

  void check_cap() const {
    if (count() > cap) {
      throw Error(ErrorKind::GuardExceeded,
                  "grid has " + std::to_string(count()) + " points, cap " +
                      std::to_string(cap));
    }
  }

  /// Calls f(point) for every grid point in odometer order (last index
  /// fastest).
  template <typename F>
  void for_each(F&& f) const {
    check_cap();
    const auto n = counts();
    std::vector<Index> k(n.size(), 0);
    Vec pt = lower;
    while (true) {
      f(static_cast<const Vec&>(pt));
      Index i = dim() - 1;
      while (i >= 0) {
        if (++k[i] < n[i]) {
          pt(i) = lower(i) + static_cast<double>(k[i]) * h;
          break;
        }
        k[i] = 0;
        pt(i) = lower(i);
        --i;
      }
      if (i < 0) return;
    }
  }

  GridSpec slice(Index from, Index len) const {
    return {lower.segment(from, len), upper.segment(from, len), h, cap,
            boundary_points};
  }
};

struct GridFront {
  std::vector<Vec> points;     // efficient objective values
  std::vector<Vec> preimages;  // matching grid points y
  std::size_t feasible_count = 0;
  std::vector<std::string> warnings;
};

namespace detail {

// Feasible sample points of {y : B y <= rhs}: the lattice points, plus the
// two ends of the feasible interval on every axis-parallel lattice line.
template <typename F>
void for_each_feasible(const Mat& B, const Vec& rhs, const GridSpec& grid,
                       double feas, F&& f) {
  const Index m = grid.dim();
  const bool constrained = B.rows() > 0;
  Vec slack(B.rows());
  grid.for_each([&](const Vec& y) {
    if (constrained) {
      slack.noalias() = rhs - B * y;
      if (slack.minCoeff() < -feas) return;
    }
    f(y);
  });
  if (!grid.boundary_points || !constrained) return;
  for (Index i = 0; i < m; ++i) {
    GridSpec lines = grid;
    lines.upper(i) = lines.lower(i);
    const double lo = grid.lower(i);
    const double hi = grid.upper(i);
    lines.for_each([&](const Vec& base) {
      // t ranges over {B(base + t e_i) <= rhs}
      slack.noalias() = rhs - B * base;
      double t_lo = lo - base(i);
      double t_hi = hi - base(i);
      for (Index r = 0; r < B.rows(); ++r) {
        const double a = B(r, i);
        if (a > 0) {
          t_hi = std::min(t_hi, slack(r) / a);
        } else if (a < 0) {
          t_lo = std::max(t_lo, slack(r) / a);
        } else if (slack(r) < -feas) {
          return;
        }
      }
      if (t_lo > t_hi) return;
      // Ends cut by a constraint; box ends are clipping, and ends on a
      // lattice point were already visited.
      auto on_lattice = [&](double t) {
        const double k = t / grid.h;
        return std::abs(k - std::round(k)) < 1e-9;
      };
      Vec y = base;
      if (t_lo > 0.0 && !on_lattice(t_lo)) {
        y(i) = lo + t_lo;
        f(static_cast<const Vec&>(y));
      }
      if (t_hi < hi - lo && t_hi > t_lo && !on_lattice(t_hi)) {
        y(i) = lo + t_hi;
        f(static_cast<const Vec&>(y));
      }
    });
  }
}

inline void clip_warnings(const LinearLowerLevel& ll, const Vec& x,
                          const GridSpec& grid, const Tolerances& tol,
                          std::vector<std::string>& warnings) {
  poly::Polyhedron Y(ll.B, ll.rhs(x));
  const Index m = ll.m();
  for (Index i = 0; i < m; ++i) {
    for (double sg : {1.0, -1.0}) {
      Vec c = Vec::Zero(m);
      c(i) = sg;
      auto lp = poly::lp_solve(c, Y, tol);
      if (lp.status == poly::LpStatus::Infeasible) return;
      if (lp.status == poly::LpStatus::Unbounded) {
        warnings.push_back("feasible set is unbounded; grid box clips it");
        return;
      }
      const double bound = sg * lp.value;
      const bool clipped = sg > 0 ? bound < grid.lower(i) - 1e-9
                                  : bound > grid.upper(i) + 1e-9;
      if (clipped) {
        warnings.push_back("grid box clips the feasible set in coordinate " +
                           std::to_string(i));
        return;
      }
    }
  }
}

}  // namespace detail

/// Objective values of feasible grid points, reduced to the efficient ones.
inline GridFront grid_front(const LinearLowerLevel& ll, const Vec& x,
                            const GridSpec& grid, EfficiencyKind kind,
                            const Tolerances& tol = {}) {
  require_dims(grid.dim() == ll.m(), "grid_front: grid must cover y");
  require_dims(x.size() == ll.n(), "grid_front: x has wrong length");
  GridFront out;
  const Vec rhs = ll.rhs(x);
  const Vec shift = ll.shift(x);
  std::vector<Vec> images;
  std::vector<Vec> ys;
  detail::for_each_feasible(ll.B, rhs, grid, tol.feas, [&](const Vec& y) {
    images.push_back(ll.C * y + shift);
    ys.push_back(y);
  });
  out.feasible_count = images.size();
  if (images.empty()) {
    out.warnings.push_back("no feasible grid point");
    return out;
  }
  detail::clip_warnings(ll, x, grid, tol, out.warnings);
  for (std::size_t i : eff_filter_indices(images, kind, tol.dom)) {
    out.points.push_back(images[i]);
    out.preimages.push_back(ys[i]);
  }
  return out;
}

inline GridFront grid_front(const BilevelProblem& pb, const Vec& x,
                            const GridSpec& grid, EfficiencyKind kind,
                            const Tolerances& tol = {}) {
  return grid_front(pb.lower, x, grid, kind, tol);
}

struct DominationCheck {
  bool holds = true;
  std::optional<Vec> witness;  // an image point with no front point below it
  double slack = 0.0;
};

/// True iff every image point v has some front point u with u <= v + slack.
inline DominationCheck domination_holds(const std::vector<Vec>& images,
                                        const std::vector<Vec>& front,
                                        double slack) {
  DominationCheck out;
  out.slack = slack;
  if (images.empty()) return out;
  const Index q = images.front().size();
  if (q == 2 && !front.empty()) {
    // Sort the front by its first coordinate and keep prefix minima of the
    // second: v is covered iff the prefix with u1 <= v1 + slack reaches
    // u2 <= v2 + slack.
    std::vector<Vec> sorted = front;
    std::sort(sorted.begin(), sorted.end(),
              [](const Vec& a, const Vec& b) { return a(0) < b(0); });
    std::vector<double> first(sorted.size()), prefix_min(sorted.size());
    double running = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      first[i] = sorted[i](0);
      running = std::min(running, sorted[i](1));
      prefix_min[i] = running;
    }
    for (const auto& v : images) {
      auto it = std::upper_bound(first.begin(), first.end(), v(0) + slack);
      const bool ok = it != first.begin() &&
                      prefix_min[static_cast<std::size_t>(it - first.begin()) - 1] <=
                          v(1) + slack;
      if (!ok) {
        out.holds = false;
        out.witness = v;
        return out;
      }
    }
    return out;
  }
  for (const auto& v : images) {
    bool covered = false;
    for (const auto& u : front) {
      if (((u.array() - v.array()) <= slack).all()) {
        covered = true;
        break;
      }
    }
    if (!covered) {
      out.holds = false;
      out.witness = v;
      return out;
    }
  }
  return out;
}

/// Grid version of the strong domination property: every feasible grid
/// image lies above some grid-front point, up to 2h(1 + |C|_inf).
inline DominationCheck grid_domination_check(const LinearLowerLevel& ll,
                                             const Vec& x, const GridSpec& grid,
                                             const Tolerances& tol = {}) {
  auto front = grid_front(ll, x, grid, EfficiencyKind::Pareto, tol);
  const double c_inf = ll.C.cwiseAbs().rowwise().sum().maxCoeff();
  const double slack = 2.0 * grid.h * (1.0 + c_inf);
  std::vector<Vec> images;
  const Vec rhs = ll.rhs(x);
  const Vec shift = ll.shift(x);
  detail::for_each_feasible(ll.B, rhs, grid, tol.feas, [&](const Vec& y) {
    images.push_back(ll.C * y + shift);
  });
  return domination_holds(images, front.points, slack);
}

inline DominationCheck grid_domination_check(const BilevelProblem& pb,
                                             const Vec& x, const GridSpec& grid,
                                             const Tolerances& tol = {}) {
  return grid_domination_check(pb.lower, x, grid, tol);
}

struct BilevelPoint {
  Vec x;
  Vec y;
  Vec F;
};

/// Pairs (x, y) on a joint grid with x in X, y in Y(x) and f(x, y) within
/// `efficiency_tol` of the grid front at x, reduced to those whose upper
/// objective values are mutually non-dominated.
inline std::vector<BilevelPoint> grid_bilevel_efficient(
    const BilevelProblem& pb, const GridSpec& grid, EfficiencyKind kind,
    double efficiency_tol, const Tolerances& tol = {},
    EfficiencyKind lower_kind = EfficiencyKind::Pareto) {
  require_dims(grid.dim() == pb.n + pb.m, "grid_bilevel_efficient: grid must cover (x, y)");
  grid.check_cap();
  const GridSpec xgrid = grid.slice(0, pb.n);
  const GridSpec ygrid = grid.slice(pb.n, pb.m);
  std::vector<BilevelPoint> candidates;
  xgrid.for_each([&](const Vec& x) {
    if (!pb.in_upper_set(x, tol.feas)) return;
    auto front = grid_front(pb.lower, x, ygrid, lower_kind, tol);
    if (front.points.empty()) return;
    const Vec rhs = pb.lower.rhs(x);
    detail::for_each_feasible(pb.lower.B, rhs, ygrid, tol.feas, [&](const Vec& y) {
      const Vec f = pb.lower.objective(x, y);
      double best = std::numeric_limits<double>::infinity();
      for (const auto& z : front.points) best = std::min(best, (f - z).norm());
      if (best <= efficiency_tol) {
        candidates.push_back({x, y, pb.upper.value(x, y)});
      }
    });
  });
  std::vector<BilevelPoint> out;
  if (candidates.empty()) return out;
  std::vector<Vec> values;
  values.reserve(candidates.size());
  for (const auto& c : candidates) values.push_back(c.F);
  for (std::size_t i : eff_filter_indices(values, kind, tol.dom)) {
    out.push_back(candidates[i]);
  }
  return out;
}

}  // namespace mobilevel::oracle
