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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mobilevel/core.hpp"
#include "mobilevel/model.hpp"
#include "mobilevel/oracle.hpp"
#include "mobilevel/pareto.hpp"
#include "mobilevel/polyhedra.hpp"
#include "mobilevel/tolerances.hpp"

namespace mobilevel::cq {

using poly::Polyhedron;

enum class Verdict { CertifiedSufficient, SampleConsistent, Violated, NotCertified };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::CertifiedSufficient: return "CertifiedSufficient";
    case Verdict::SampleConsistent: return "SampleConsistent";
    case Verdict::Violated: return "Violated";
    case Verdict::NotCertified: return "NotCertified";
  }
  return "?";
}

struct Witness {
  Vec x;
  Vec y;
  Vec aux;  // weight y*, front point, ... depending on the check
  double value = 0.0;
  std::string what;
};

struct CqReport {
  std::string condition;
  Verdict verdict = Verdict::NotCertified;
  std::map<std::string, double> estimates;
  std::vector<Witness> witnesses;
  std::vector<std::string> chain;
  std::vector<std::string> notes;
  std::size_t samples = 0;

  double estimate(const std::string& name) const {
    auto it = estimates.find(name);
    return it == estimates.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
  }
};

/// Box in (x, y)-space swept with step h.
struct SampledRegion {
  Vec x_lower, x_upper;
  Vec y_lower, y_upper;
  double h = 0.05;
  std::size_t cap = oracle::kDefaultGridCap;

  oracle::GridSpec x_grid() const { return {x_lower, x_upper, h, cap, false}; }
  oracle::GridSpec y_grid() const { return {y_lower, y_upper, h, cap, false}; }

  std::size_t count() const {
    const double total = static_cast<double>(x_grid().count()) *
                         static_cast<double>(y_grid().count());
    return total > 1e18 ? std::numeric_limits<std::size_t>::max()
                        : static_cast<std::size_t>(total);
  }

  void validate(Index n, Index m) const {
    require_dims(x_lower.size() == n && x_upper.size() == n,
                 "region: x box must have n entries");
    require_dims(y_lower.size() == m && y_upper.size() == m,
                 "region: y box must have m entries");
    if (count() > cap) {
      throw Error(ErrorKind::GuardExceeded, "region has " + std::to_string(count()) +
                                                " sample points, cap " + std::to_string(cap));
    }
  }
};

/// Indices i with values(i) >= -tol.
inline std::vector<Index> active_rows(const Vec& values, double tol) {
  std::vector<Index> out;
  for (Index i = 0; i < values.size(); ++i) {
    if (values(i) >= -tol) out.push_back(i);
  }
  return out;
}

inline Mat select_rows(const Mat& M, const std::vector<Index>& rows) {
  Mat out(static_cast<Index>(rows.size()), M.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = M.row(rows[i]);
  return out;
}

namespace detail {

// Per-x data shared by every y of a sweep.
struct LowerAtX {
  pareto::ParetoFront front;
  pareto::EfficientSet efficient;
};

inline std::optional<LowerAtX> lower_at(const LinearLowerLevel& ll, const Vec& x,
                                        const Tolerances& tol) {
  try {
    return LowerAtX{pareto::frontier_map(ll, x, EfficiencyKind::Pareto, tol),
                    pareto::efficient_set(ll, x, tol)};
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Infeasible) return std::nullopt;  // x outside dom S
    throw;
  }
}

// Distances below this count as membership of S(x).
inline double efficiency_gap(const Tolerances& tol) {
  return std::max(tol.zero, 10.0 * tol.proj);
}

inline double graph_distance(const LinearLowerLevel& ll, const Vec& x, const Vec& y,
                             const Tolerances& tol) {
  if ((ll.constraints(x, y)).maxCoeff() <= tol.feas) return 0.0;
  Mat M(ll.k(), ll.n() + ll.m());
  M << ll.A, ll.B;
  Vec z(ll.n() + ll.m());
  z << x, y;
  return poly::project_polyhedron(z, Polyhedron{M, ll.d}, tol).distance;
}

}  // namespace detail

/// d(f(x,y), Phi(x)) / d(y, S(x)) at a single point; NaN if y is efficient.
inline double uwsm_ratio(const BilevelProblem& pb, const Vec& x, const Vec& y,
                         const Tolerances& tol = {}) {
  auto at = detail::lower_at(pb.lower, x, tol);
  if (!at) throw Error(ErrorKind::Infeasible, "Y(x) is empty");
  const double ds = pareto::distance_to_faces(at->efficient.faces, y, tol);
  if (ds <= detail::efficiency_gap(tol)) return std::numeric_limits<double>::quiet_NaN();
  return pareto::distance_to_front(at->front, pb.lower.objective(x, y), tol) / ds;
}

/// d(y, S(x)) / max{d(f(x,y), Phi(x)), d((x,y), gph Y)}; NaN for 0/0 and
/// +inf for a zero denominator under a positive numerator.
inline double rreg_ratio(const BilevelProblem& pb, const Vec& x, const Vec& y,
                         const Tolerances& tol = {}) {
  auto at = detail::lower_at(pb.lower, x, tol);
  if (!at) throw Error(ErrorKind::Infeasible, "Y(x) is empty");
  const double ds = pareto::distance_to_faces(at->efficient.faces, y, tol);
  const double den = std::max(
      pareto::distance_to_front(at->front, pb.lower.objective(x, y), tol),
      detail::graph_distance(pb.lower, x, y, tol));
  const bool num_zero = ds <= detail::efficiency_gap(tol);
  if (den <= tol.zero) {
    return num_zero ? std::numeric_limits<double>::quiet_NaN()
                    : std::numeric_limits<double>::infinity();
  }
  return num_zero ? 0.0 : ds / den;
}

namespace detail {

// Calls f(x, lower_at(x), y) for every sampled x in X with Y(x) nonempty and
// every sampled y. Returns the number of x values used.
template <typename F>
std::size_t sweep(const BilevelProblem& pb, const SampledRegion& region,
                  const Tolerances& tol, F&& f) {
  region.validate(pb.n, pb.m);
  std::size_t xs = 0;
  region.x_grid().for_each([&](const Vec& x) {
    if (!pb.in_upper_set(x, tol.feas)) return;
    auto at = lower_at(pb.lower, x, tol);
    if (!at) return;
    ++xs;
    region.y_grid().for_each([&](const Vec& y) { f(x, *at, y); });
  });
  return xs;
}

}  // namespace detail

/// lambda-hat: the smallest ratio d(f, Phi(x)) / d(y, S(x)) over sampled
/// feasible (x, y) with y outside S(x).
inline CqReport estimate_uwsm_lambda(const BilevelProblem& pb, const SampledRegion& region,
                                     const Tolerances& tol = {}) {
  CqReport rep;
  rep.condition = "UWSM";
  double best = std::numeric_limits<double>::infinity();
  Witness w;
  std::size_t feasible = 0;
  const std::size_t xs = detail::sweep(pb, region, tol, [&](const Vec& x,
                                                           const detail::LowerAtX& at,
                                                           const Vec& y) {
    if (pb.lower.constraints(x, y).maxCoeff() > tol.feas) return;
    ++feasible;
    const double ds = pareto::distance_to_faces(at.efficient.faces, y, tol);
    if (ds <= detail::efficiency_gap(tol)) return;
    ++rep.samples;
    const double ratio =
        pareto::distance_to_front(at.front, pb.lower.objective(x, y), tol) / ds;
    if (ratio < best) {
      best = ratio;
      w = {x, y, Vec(), ratio, "infimum ratio"};
    }
  });
  if (xs == 0 || feasible == 0) {
    rep.notes.push_back("region does not meet gph Y");
  }
  if (rep.samples == 0) {
    throw Error(ErrorKind::VacuousSample,
                "no sampled feasible point lies outside S(x); UWSM is vacuous on this region");
  }
  rep.estimates["lambda"] = best;
  w.what = best > tol.pos ? "infimum ratio" : "ratio at or below tau_pos";
  rep.witnesses.push_back(w);
  rep.verdict = best > tol.pos ? Verdict::SampleConsistent : Verdict::Violated;
  rep.chain = {"UWSM (sampled)", "LUWSM", "GVFCQ"};
  rep.notes.push_back("Euclidean norms; sample-level evidence over the region box");
  return rep;
}

/// sigma-hat: the largest ratio d(y, S(x)) / max{d(f, Phi(x)), d((x,y), gph Y)}
/// over sampled (x, y), skipping 0/0.
inline CqReport estimate_rreg_sigma(const BilevelProblem& pb, const SampledRegion& region,
                                    const Tolerances& tol = {}) {
  CqReport rep;
  rep.condition = "R-regularity";
  double best = -std::numeric_limits<double>::infinity();
  Witness w;
  std::optional<Witness> violation;
  Mat M(pb.lower.k(), pb.n + pb.m);
  M << pb.lower.A, pb.lower.B;
  const Polyhedron graph{M, pb.lower.d};
  detail::sweep(pb, region, tol, [&](const Vec& x, const detail::LowerAtX& at, const Vec& y) {
    if (violation) return;
    const double ds = pareto::distance_to_faces(at.efficient.faces, y, tol);
    double dg = 0.0;
    if (pb.lower.constraints(x, y).maxCoeff() > tol.feas) {
      Vec z(pb.n + pb.m);
      z << x, y;
      dg = poly::project_polyhedron(z, graph, tol).distance;
    }
    const double den =
        std::max(pareto::distance_to_front(at.front, pb.lower.objective(x, y), tol), dg);
    const bool num_zero = ds <= detail::efficiency_gap(tol);
    if (den <= tol.zero) {
      if (!num_zero) {
        violation = Witness{x, y, Vec(), std::numeric_limits<double>::infinity(),
                            "zero residuals with y outside S(x)"};
      }
      return;
    }
    ++rep.samples;
    const double ratio = num_zero ? 0.0 : ds / den;
    if (ratio > best) {
      best = ratio;
      w = {x, y, Vec(), ratio, "supremum ratio"};
    }
  });
  rep.chain = {"R-regularity (sampled)", "GVFCQ"};
  if (violation) {
    rep.verdict = Verdict::Violated;
    rep.estimates["sigma"] = std::numeric_limits<double>::infinity();
    rep.witnesses.push_back(*violation);
    return rep;
  }
  if (rep.samples == 0) {
    throw Error(ErrorKind::VacuousSample,
                "every sampled point gave 0/0; R-regularity is vacuous on this region");
  }
  rep.estimates["sigma"] = best;
  rep.witnesses.push_back(w);
  rep.verdict = Verdict::SampleConsistent;
  rep.notes.push_back("Euclidean norms; sample-level evidence over the region box");
  return rep;
}

/// Checks the linear sufficient condition on sampled x: S(x) uniformly
/// bounded (k-hat) and alpha' C y >= delta-hat > 0 on S(x) for all weights.
inline CqReport check_linear_uwsm(const BilevelProblem& pb, const std::vector<Vec>& xs,
                                  const Tolerances& tol = {}) {
  CqReport rep;
  rep.condition = "Linear CQ";
  if (xs.empty()) throw Error(ErrorKind::EmptyInput, "check_linear_uwsm: no sample x");
  if (pb.q > 2) {
    throw Error(ErrorKind::Unsupported, "check_linear_uwsm needs q <= 2 (exact regime)");
  }
  double delta = std::numeric_limits<double>::infinity();
  double k = 0.0;
  Witness low;
  for (const auto& x : xs) {
    require_dims(x.size() == pb.n, "check_linear_uwsm: x has wrong length");
    if (!pb.in_upper_set(x, tol.feas)) {
      throw Error(ErrorKind::InfeasibleCandidate, "check_linear_uwsm: sample x is not in X");
    }
    const auto S = pareto::efficient_set(pb.lower, x, tol);
    for (const auto& face : S.faces) {
      for (const auto& v : face.vertices) {
        k = std::max(k, v.norm());
        const Vec cy = pb.lower.C * v;
        Index i = 0;
        const double lo = cy.minCoeff(&i);
        if (lo < delta) {
          delta = lo;
          Vec e = Vec::Zero(pb.q);
          e(i) = 1.0;
          low = {x, v, e, lo, "smallest (C y)_i over S(x) vertices"};
        }
      }
    }
    ++rep.samples;
  }
  rep.estimates["delta"] = delta;
  rep.estimates["k"] = k;
  rep.chain = {"Linear CQ", "UWSM", "LUWSM", "GVFCQ"};
  if (!pb.lower.unshifted()) {
    rep.notes.push_back("objective has an x-part; delta uses C only");
  }
  bool x_bounded = false;
  if (pb.upper_set.rows() > 0) {
    try {
      x_bounded = poly::is_bounded(Polyhedron{pb.upper_set.G, pb.upper_set.h}, tol);
    } catch (const Error&) {
      x_bounded = false;
    }
  }
  if (!x_bounded) rep.notes.push_back("sampled X");
  if (delta > tol.zero) {
    rep.verdict = Verdict::CertifiedSufficient;
  } else {
    rep.verdict = Verdict::Violated;
    rep.witnesses.push_back(low);
  }
  return rep;
}

namespace detail {

// Is some convex combination of the face vertices <= v + slack?
inline bool face_below(const poly::VPolytope& face, const Vec& v, double slack,
                       const Tolerances& tol) {
  const Index t = static_cast<Index>(face.vertices.size());
  const Index q = v.size();
  Mat W(q, t);
  for (Index j = 0; j < t; ++j) W.col(j) = face.vertices[static_cast<std::size_t>(j)];
  // rows: W lam <= v + slack, -lam <= 0, 1'lam <= 1, -1'lam <= -1
  Mat M(q + t + 2, t);
  Vec b(q + t + 2);
  M.topRows(q) = W;
  b.head(q) = v.array() + slack;
  M.middleRows(q, t) = -Mat::Identity(t, t);
  b.segment(q, t).setZero();
  M.row(q + t).setOnes();
  b(q + t) = 1.0;
  M.row(q + t + 1).setConstant(-1.0);
  b(q + t + 1) = -1.0;
  return poly::lp_feasible_point(Polyhedron{M, b}, tol).status == poly::LpStatus::Optimal;
}

}  // namespace detail

/// Strong domination at x: every image vertex lies in Phi^E(x) + R^q_+.
inline CqReport check_strong_domination(const BilevelProblem& pb, const Vec& x,
                                        const Tolerances& tol = {}) {
  CqReport rep;
  rep.condition = "strong domination";
  rep.chain = {"Y(x) bounded", "strong domination"};
  const Polyhedron Y = pareto::feasible_set(pb.lower, x);
  if (!poly::is_bounded(Y, tol)) {
    rep.verdict = Verdict::NotCertified;
    rep.notes.push_back("premise failed: bounded");
    return rep;
  }
  const auto front = pareto::frontier_map(pb.lower, x, EfficiencyKind::Pareto, tol);
  const double slack = tol.dom + tol.face;
  for (const auto& v : poly::vertex_enumerate(Y, tol)) {
    const Vec z = pb.lower.objective(x, v);
    ++rep.samples;
    bool covered = false;
    for (const auto& face : front.faces) {
      if (detail::face_below(face, z, slack, tol)) {
        covered = true;
        break;
      }
    }
    if (!covered) {
      rep.verdict = Verdict::Violated;
      rep.witnesses.push_back({x, v, z, 0.0, "image vertex with no front point below it"});
      return rep;
    }
  }
  if (front.approximate) {
    rep.verdict = Verdict::SampleConsistent;
    rep.notes.push_back("front is a grid approximation (q >= 3)");
  } else {
    rep.verdict = Verdict::CertifiedSufficient;
  }
  return rep;
}

/// Sufficient condition with the normal-cone generators: for sampled front
/// vertices z and weights y* over the components where f(x,y) >= z, the
/// smallest |C' y* + B_act' nu| (nu >= 0) must reach 1 / lambda.
inline CqReport check_nonlinear_cq(const BilevelProblem& pb, const Vec& x, const Vec& y,
                                   double lambda, int weight_grid,
                                   const Tolerances& tol = {}) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::Parse, "lambda must be positive");
  if (weight_grid < 2) throw Error(ErrorKind::Parse, "weight_grid must be at least 2");
  const auto& ll = pb.lower;
  require_dims(x.size() == pb.n && y.size() == pb.m, "check_nonlinear_cq: wrong lengths");
  const Vec g = ll.constraints(x, y);
  if (g.size() > 0 && g.maxCoeff() > tol.feas) {
    throw Error(ErrorKind::InfeasibleCandidate, "y is not in Y(x)");
  }
  const auto front = pareto::frontier_map(ll, x, EfficiencyKind::Pareto, tol);
  const auto S = pareto::efficient_set(ll, x, tol);
  if (pareto::distance_to_faces(S.faces, y, tol) <= detail::efficiency_gap(tol)) {
    throw Error(ErrorKind::VacuousSample, "criterion vacuous at efficient points");
  }
  const Mat Bact = select_rows(ll.B, active_rows(g, tol.act));
  const Mat BactT = Bact.transpose();
  const Vec f = ll.objective(x, y);
  const double target = 1.0 / lambda;

  CqReport rep;
  rep.condition = "nonlinear CQ";
  rep.chain = {"nonlinear CQ", "LUWSM", "GVFCQ"};
  double best = std::numeric_limits<double>::infinity();
  Witness arg;
  for (const auto& z : front.vertices) {
    std::vector<Index> comps;
    for (Index i = 0; i < ll.q(); ++i) {
      if (f(i) >= z(i) - tol.act) comps.push_back(i);
    }
    if (comps.empty()) continue;
    // Compositions of weight_grid - 1 over the active components.
    const int N = weight_grid - 1;
    std::vector<int> parts(comps.size(), 0);
    parts.back() = N;
    while (true) {
      Vec ystar = Vec::Zero(ll.q());
      for (std::size_t j = 0; j < comps.size(); ++j) {
        ystar(comps[j]) = static_cast<double>(parts[j]) / N;
      }
      const double norm = poly::nnls_min_norm(BactT, ll.C.transpose() * ystar, tol).value;
      ++rep.samples;
      if (norm < best) {
        best = norm;
        arg = {x, y, ystar, norm, "smallest min-norm element"};
      }
      // next composition (reverse lexicographic on all but the last part)
      std::size_t i = comps.size() - 1;
      while (i > 0 && parts[i] == 0) --i;
      if (i == 0) break;
      const int rest = parts[i];
      parts[i] = 0;
      ++parts[i - 1];
      parts.back() = rest - 1;
    }
  }
  rep.estimates["min_norm"] = best;
  rep.estimates["lambda_required"] = best > 0 ? 1.0 / best : std::numeric_limits<double>::infinity();
  rep.witnesses.push_back(arg);
  if (best < target - tol.pos) {
    rep.verdict = Verdict::Violated;
    rep.witnesses.back().what = "min-norm element below 1/lambda";
  } else {
    rep.verdict = Verdict::SampleConsistent;
  }
  rep.notes.push_back("normal cone taken at the projection of f(x,y) onto z - R^q_+; "
                      "z sampled at front vertices");
  return rep;
}

struct MfcqResult {
  bool holds = true;
  std::vector<Index> active;
  Vec direction;
  double margin = 0.0;  // max t with g_i' d <= -t |g_i|, |d|_inf <= 1
};

/// MFCQ for the constraint gradients `rows` (one per row): the largest t with
/// normalized rows satisfying g_i' d / |g_i| <= -t over |d|_inf <= 1.
inline MfcqResult mfcq_margin(const Mat& rows, const Tolerances& tol = {}) {
  MfcqResult out;
  const Index s = rows.cols();
  const Index a = rows.rows();
  out.direction = Vec::Zero(s);
  if (a == 0) {
    out.margin = std::numeric_limits<double>::infinity();
    return out;
  }
  // variables (d, t)
  Mat M = Mat::Zero(a + 2 * s + 1, s + 1);
  Vec b = Vec::Zero(a + 2 * s + 1);
  for (Index i = 0; i < a; ++i) {
    const double nrm = rows.row(i).norm();
    if (nrm > 0) M.row(i).head(s) = rows.row(i) / nrm;
    M(i, s) = 1.0;
  }
  M.block(a, 0, s, s) = Mat::Identity(s, s);
  M.block(a + s, 0, s, s) = -Mat::Identity(s, s);
  b.segment(a, 2 * s).setOnes();
  M(a + 2 * s, s) = 1.0;
  b(a + 2 * s) = 1.0;
  Vec c = Vec::Zero(s + 1);
  c(s) = -1.0;
  auto lp = poly::lp_solve(c, Polyhedron{M, b}, tol);
  out.margin = -lp.value;
  out.direction = lp.minimizer.head(s);
  out.holds = out.margin > tol.pos;
  return out;
}

/// Upper-level regularity at x (constraints G x <= h).
inline MfcqResult upper_mfcq(const BilevelProblem& pb, const Vec& x, const Tolerances& tol = {}) {
  require_dims(x.size() == pb.n, "check_upper_mfcq: x has wrong length");
  MfcqResult out;
  if (pb.upper_set.rows() > 0) {
    auto act = active_rows(pb.upper_set.value(x), tol.act);
    out = mfcq_margin(select_rows(pb.upper_set.G, act), tol);
    out.active = act;
  } else {
    out = mfcq_margin(Mat(0, pb.n), tol);
  }
  return out;
}

/// Lower-level regularity at (x, y): strict descent for the y-gradients of
/// the active rows.
inline MfcqResult lower_mfcq(const BilevelProblem& pb, const Vec& x, const Vec& y,
                             const Tolerances& tol = {}) {
  require_dims(x.size() == pb.n && y.size() == pb.m, "check_lower_mfcq: wrong lengths");
  auto act = active_rows(pb.lower.constraints(x, y), tol.act);
  auto out = mfcq_margin(select_rows(pb.lower.B, act), tol);
  out.active = act;
  return out;
}

inline bool check_upper_mfcq(const BilevelProblem& pb, const Vec& x, const Tolerances& tol = {}) {
  return upper_mfcq(pb, x, tol).holds;
}

inline bool check_lower_mfcq(const BilevelProblem& pb, const Vec& x, const Vec& y,
                             const Tolerances& tol = {}) {
  return lower_mfcq(pb, x, y, tol).holds;
}

struct GvfcqConfig {
  bool linear = true;
  std::vector<Vec> xs;  // samples for the linear check; empty means {x}
  std::optional<SampledRegion> region;
  bool uwsm = true;
  bool rreg = true;
};

/// Combines the sufficient conditions into a GVFCQ verdict. A certified
/// antecedent wins over sampled evidence, which wins over violations.
inline CqReport gvfcq_verdict(const BilevelProblem& pb, const Vec& x, const Vec& y,
                              const GvfcqConfig& config = {}, const Tolerances& tol = {}) {
  CqReport rep;
  rep.condition = "GVFCQ";
  std::vector<CqReport> subs;
  auto run = [&](const char* name, auto&& fn) {
    try {
      subs.push_back(fn());
    } catch (const Error& e) {
      rep.notes.push_back(std::string(name) + ": " + e.what());
    }
  };
  if (config.linear && pb.lower.unshifted() && pb.q <= 2) {
    run("Linear CQ", [&] {
      return check_linear_uwsm(pb, config.xs.empty() ? std::vector<Vec>{x} : config.xs, tol);
    });
  }
  if (config.region) {
    if (config.uwsm) run("UWSM", [&] { return estimate_uwsm_lambda(pb, *config.region, tol); });
    if (config.rreg) run("R-regularity", [&] { return estimate_rreg_sigma(pb, *config.region, tol); });
  }
  (void)y;
  const CqReport* pick = nullptr;
  for (Verdict want : {Verdict::CertifiedSufficient, Verdict::SampleConsistent,
                       Verdict::Violated}) {
    for (const auto& s : subs) {
      if (s.verdict == want) {
        pick = &s;
        break;
      }
    }
    if (pick) break;
  }
  for (const auto& s : subs) {
    for (const auto& [k, v] : s.estimates) rep.estimates[s.condition + "." + k] = v;
    for (const auto& n : s.notes) rep.notes.push_back(s.condition + ": " + n);
    rep.samples += s.samples;
  }
  if (!pick) {
    rep.verdict = Verdict::NotCertified;
    rep.notes.push_back("no sufficient condition could be evaluated");
    return rep;
  }
  rep.verdict = pick->verdict;
  rep.chain = pick->chain;
  if (rep.chain.empty() || rep.chain.back() != "GVFCQ") rep.chain.push_back("GVFCQ");
  rep.witnesses = pick->witnesses;
  return rep;
}

}  // namespace mobilevel::cq
