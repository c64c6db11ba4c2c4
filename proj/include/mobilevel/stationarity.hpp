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
#include <string>
#include <vector>

#include "mobilevel/core.hpp"
#include "mobilevel/cq.hpp"
#include "mobilevel/model.hpp"
#include "mobilevel/simplex.hpp"
#include "mobilevel/tolerances.hpp"

namespace mobilevel::stationarity {

using poly::Polyhedron;

struct ActiveSets {
  std::vector<Index> I_G;
  std::vector<Index> I_g;
  Vec G_values;  // G(x) = G x - h
  Vec g_values;  // g(x, y) = A x + B y - d
  // rows with tau_act < |value| <= 10 tau_act
  std::vector<Index> near_G;
  std::vector<Index> near_g;
};

/// Active rows at a feasible candidate; throws InfeasibleCandidate naming
/// the violated rows otherwise.
inline ActiveSets detect_active_sets(const BilevelProblem& pb, const Vec& x, const Vec& y,
                                     const Tolerances& tol = {}) {
  require_dims(x.size() == pb.n && y.size() == pb.m, "candidate has wrong dimensions");
  ActiveSets out;
  out.G_values = pb.upper_set.rows() > 0 ? pb.upper_set.value(x) : Vec(0);
  out.g_values = pb.lower.constraints(x, y);
  std::string bad;
  auto scan = [&](const Vec& vals, const char* name, std::vector<Index>& act,
                  std::vector<Index>& near) {
    for (Index i = 0; i < vals.size(); ++i) {
      const double a = std::abs(vals(i));
      if (vals(i) > tol.feas) {
        bad += std::string(bad.empty() ? "" : ", ") + name + "[" + std::to_string(i) +
               "] = " + std::to_string(vals(i));
      }
      if (a <= tol.act) {
        act.push_back(i);
      } else if (a <= 10.0 * tol.act) {
        near.push_back(i);
      }
    }
  };
  scan(out.G_values, "G", out.I_G, out.near_G);
  scan(out.g_values, "g", out.I_g, out.near_g);
  if (!bad.empty()) {
    throw Error(ErrorKind::InfeasibleCandidate, "candidate violates " + bad);
  }
  return out;
}

/// E z = f with sign constraints; the first `p` unknowns are w*.
struct LinearSystem {
  Mat E;
  Vec f;
  std::vector<char> nonneg;
  std::vector<char> cost;  // counted (in absolute value) in the second stage
  std::vector<std::string> row_labels;
  Index p = 0;

  Index unknowns() const { return E.cols(); }

  /// Equalities as paired inequalities, then -z_j <= 0 for signed unknowns.
  Polyhedron polyhedron() const {
    const Index N = unknowns();
    Index signs = 0;
    for (char c : nonneg) signs += c ? 1 : 0;
    Mat M = Mat::Zero(2 * E.rows() + signs, N);
    Vec b = Vec::Zero(2 * E.rows() + signs);
    M.topRows(E.rows()) = E;
    b.head(E.rows()) = f;
    M.middleRows(E.rows(), E.rows()) = -E;
    b.segment(E.rows(), E.rows()) = -f;
    Index r = 2 * E.rows();
    for (Index j = 0; j < N; ++j) {
      if (nonneg[j]) M(r++, j) = -1.0;
    }
    return {M, b};
  }
};

/// Column offsets of the multiplier blocks.
struct KktLayout {
  Index w_star = 0, v_star = 0, u = 0, v = 0, w = 0, xi = -1;
};

struct KktSystem {
  LinearSystem system;
  KktLayout layout;
  ActiveSets active;
};

/// The smooth stationarity system at (x, y) with multipliers of slack rows
/// eliminated. Unknowns (w*, v*, u_{I_G}, v_{I_g}, w_{I_g}).
inline KktSystem assemble_kkt(const BilevelProblem& pb, const Vec& x, const Vec& y,
                              const ActiveSets& act) {
  const Index n = pb.n, m = pb.m, p = pb.p, q = pb.q;
  const Index aG = static_cast<Index>(act.I_G.size());
  const Index ag = static_cast<Index>(act.I_g.size());
  const Mat J = pb.upper.jacobian(x, y);  // p x (n + m)
  const Mat Gact = cq::select_rows(pb.upper_set.G, act.I_G);
  const Mat Aact = cq::select_rows(pb.lower.A, act.I_g);
  const Mat Bact = cq::select_rows(pb.lower.B, act.I_g);

  KktSystem out;
  out.active = act;
  auto& L = out.layout;
  L.w_star = 0;
  L.v_star = p;
  L.u = p + q;
  L.v = L.u + aG;
  L.w = L.v + ag;
  const Index N = L.w + ag;

  LinearSystem& S = out.system;
  S.p = p;
  S.E = Mat::Zero(m + n + m + 1, N);
  S.f = Vec::Zero(m + n + m + 1);
  // -C' v* + B_act' v = 0
  S.E.block(0, L.v_star, m, q) = -pb.lower.C.transpose();
  S.E.block(0, L.v, m, ag) = Bact.transpose();
  // x-block: grad_x F' w* + G_act' u + A_act' (v + w) = 0
  S.E.block(m, L.w_star, n, p) = J.leftCols(n).transpose();
  S.E.block(m, L.u, n, aG) = Gact.transpose();
  S.E.block(m, L.v, n, ag) = Aact.transpose();
  S.E.block(m, L.w, n, ag) = Aact.transpose();
  // y-block: grad_y F' w* + B_act' (v + w) = 0
  S.E.block(m + n, L.w_star, m, p) = J.rightCols(m).transpose();
  S.E.block(m + n, L.v, m, ag) = Bact.transpose();
  S.E.block(m + n, L.w, m, ag) = Bact.transpose();
  // sum w* = 1
  S.E.block(m + n + m, L.w_star, 1, p).setOnes();
  S.f(m + n + m) = 1.0;

  S.nonneg.assign(static_cast<std::size_t>(N), 1);
  for (Index j = 0; j < q; ++j) S.nonneg[static_cast<std::size_t>(L.v_star + j)] = 0;
  S.cost.assign(static_cast<std::size_t>(N), 1);
  for (Index j = 0; j < p; ++j) S.cost[static_cast<std::size_t>(j)] = 0;
  for (Index i = 0; i < m; ++i) S.row_labels.push_back("lower adjoint[" + std::to_string(i) + "]");
  for (Index i = 0; i < n; ++i) S.row_labels.push_back("x-block[" + std::to_string(i) + "]");
  for (Index i = 0; i < m; ++i) S.row_labels.push_back("y-block[" + std::to_string(i) + "]");
  S.row_labels.push_back("normalization");
  return out;
}

enum class Status { Stationary, NotStationary };

inline std::string to_string(Status s) {
  return s == Status::Stationary ? "Stationary" : "NotStationary";
}

struct StationarityCertificate {
  Status status = Status::NotStationary;
  // Stationary: full-length multipliers (zeros on inactive rows)
  Vec w_star, v_star, u, v, w;
  // NotStationary: lambda over the rows of `system`
  Vec farkas;
  Polyhedron system;
  ActiveSets active;
  bool formula_guaranteed = true;
  std::vector<std::string> notes;
};

namespace detail {

struct Solved {
  bool feasible = false;
  Vec z;
  Vec farkas;
  Polyhedron P;
};

// Feasibility, then the most balanced w* (min max_k w*_k), then the
// smallest total |multiplier| among those.
inline Solved solve_system(const LinearSystem& S, const Tolerances& tol) {
  Solved out;
  out.P = S.polyhedron();
  auto feas = poly::lp_feasible_point(out.P, tol);
  if (feas.status != poly::LpStatus::Optimal) {
    out.farkas = feas.farkas;
    return out;
  }
  out.feasible = true;
  const Index N = S.unknowns();
  const Index R = out.P.rows();

  // stage 1 over (z, t)
  Mat M1 = Mat::Zero(R + S.p, N + 1);
  Vec b1 = Vec::Zero(R + S.p);
  M1.topLeftCorner(R, N) = out.P.M;
  b1.head(R) = out.P.b;
  for (Index k = 0; k < S.p; ++k) {
    M1(R + k, k) = 1.0;
    M1(R + k, N) = -1.0;
  }
  Vec c1 = Vec::Zero(N + 1);
  c1(N) = 1.0;
  auto st1 = poly::lp_solve(c1, Polyhedron{M1, b1}, tol);
  if (st1.status != poly::LpStatus::Optimal) {
    out.z = feas.minimizer;
    return out;
  }
  const double cap = st1.value + tol.zero * (1.0 + std::abs(st1.value));

  // stage 2 over (z, s) with s_j >= |z_j| for free costed unknowns
  std::vector<Index> free_cost;
  for (Index j = 0; j < N; ++j) {
    if (S.cost[static_cast<std::size_t>(j)] && !S.nonneg[static_cast<std::size_t>(j)]) {
      free_cost.push_back(j);
    }
  }
  const Index F = static_cast<Index>(free_cost.size());
  Mat M2 = Mat::Zero(R + S.p + 2 * F, N + F);
  Vec b2 = Vec::Zero(R + S.p + 2 * F);
  M2.topLeftCorner(R, N) = out.P.M;
  b2.head(R) = out.P.b;
  for (Index k = 0; k < S.p; ++k) {
    M2(R + k, k) = 1.0;
    b2(R + k) = cap;
  }
  for (Index i = 0; i < F; ++i) {
    const Index j = free_cost[static_cast<std::size_t>(i)];
    M2(R + S.p + 2 * i, j) = 1.0;
    M2(R + S.p + 2 * i, N + i) = -1.0;
    M2(R + S.p + 2 * i + 1, j) = -1.0;
    M2(R + S.p + 2 * i + 1, N + i) = -1.0;
  }
  Vec c2 = Vec::Zero(N + F);
  for (Index j = 0; j < N; ++j) {
    if (S.cost[static_cast<std::size_t>(j)] && S.nonneg[static_cast<std::size_t>(j)]) c2(j) = 1.0;
  }
  c2.tail(F).setOnes();
  auto st2 = poly::lp_solve(c2, Polyhedron{M2, b2}, tol);
  out.z = st2.status == poly::LpStatus::Optimal ? Vec(st2.minimizer.head(N)) : st1.minimizer.head(N);
  return out;
}

inline StationarityCertificate unpack(const BilevelProblem& pb, const KktSystem& K,
                                      const Solved& s) {
  StationarityCertificate c;
  c.active = K.active;
  c.system = s.P;
  if (!s.feasible) {
    c.status = Status::NotStationary;
    c.farkas = s.farkas;
    return c;
  }
  c.status = Status::Stationary;
  const auto& L = K.layout;
  c.w_star = s.z.segment(L.w_star, pb.p);
  c.v_star = s.z.segment(L.v_star, pb.q);
  c.u = Vec::Zero(pb.upper_set.rows());
  c.v = Vec::Zero(pb.lower.k());
  c.w = Vec::Zero(pb.lower.k());
  for (std::size_t i = 0; i < K.active.I_G.size(); ++i) {
    c.u(K.active.I_G[i]) = s.z(L.u + static_cast<Index>(i));
  }
  for (std::size_t i = 0; i < K.active.I_g.size(); ++i) {
    c.v(K.active.I_g[i]) = s.z(L.v + static_cast<Index>(i));
    c.w(K.active.I_g[i]) = s.z(L.w + static_cast<Index>(i));
  }
  return c;
}

template <typename Assemble>
StationarityCertificate certify_with(const BilevelProblem& pb, const Vec& x, const Vec& y,
                                     const Tolerances& tol, Assemble&& assemble) {
  const ActiveSets act = detect_active_sets(pb, x, y, tol);
  const KktSystem K = assemble(act);
  auto cert = unpack(pb, K, solve_system(K.system, tol));
  if (!act.near_G.empty() || !act.near_g.empty()) {
    ActiveSets alt = act;
    alt.I_G.insert(alt.I_G.end(), act.near_G.begin(), act.near_G.end());
    alt.I_g.insert(alt.I_g.end(), act.near_g.begin(), act.near_g.end());
    std::sort(alt.I_G.begin(), alt.I_G.end());
    std::sort(alt.I_g.begin(), alt.I_g.end());
    const KktSystem K2 = assemble(alt);
    const bool alt_ok = solve_system(K2.system, tol).feasible;
    cert.notes.push_back(
        "near-active rows within 10 tau_act: status " + to_string(cert.status) +
        " with them slack, " + (alt_ok ? "Stationary" : "NotStationary") +
        " with them active");
  }
  return cert;
}

}  // namespace detail

/// Multiplier certificate for the stationarity system at (x, y), or a
/// Farkas refutation of it.
inline StationarityCertificate certify(const BilevelProblem& pb, const Vec& x, const Vec& y,
                                       const Tolerances& tol = {}) {
  return detail::certify_with(pb, x, y, tol, [&](const ActiveSets& a) {
    return assemble_kkt(pb, x, y, a);
  });
}

struct Residuals {
  double lower_adjoint = 0.0;   // -C'v* + B'v
  double stationarity = 0.0;    // grad F' w* + [G'u; 0] + grad g'(v + w)
  double comp_u = 0.0;          // max |u_i G_i|
  double comp_v = 0.0;
  double comp_w = 0.0;
  double normalization = 0.0;   // |sum w* - 1|
  double sign = 0.0;            // largest negative part of w*, u, v, w

  double max() const {
    return std::max({lower_adjoint, stationarity, comp_u, comp_v, comp_w, normalization, sign});
  }
};

/// Direct evaluation of every relation of the system for a Stationary
/// certificate; independent of the assembly.
inline Residuals residuals(const BilevelProblem& pb, const Vec& x, const Vec& y,
                           const StationarityCertificate& c) {
  Residuals r;
  const auto& ll = pb.lower;
  auto inf = [](const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; };
  auto neg = [](const Vec& v) { return v.size() ? std::max(0.0, -v.minCoeff()) : 0.0; };
  r.lower_adjoint = inf(-ll.C.transpose() * c.v_star + ll.B.transpose() * c.v);
  const Mat J = pb.upper.jacobian(x, y);
  Vec st = J.transpose() * c.w_star;
  Mat grad_g(ll.k(), pb.n + pb.m);
  grad_g << ll.A, ll.B;
  st += grad_g.transpose() * (c.v + c.w);
  if (pb.upper_set.rows() > 0) st.head(pb.n) += pb.upper_set.G.transpose() * c.u;
  r.stationarity = inf(st);
  const Vec g = ll.constraints(x, y);
  if (pb.upper_set.rows() > 0) r.comp_u = inf(c.u.cwiseProduct(pb.upper_set.value(x)));
  r.comp_v = inf(c.v.cwiseProduct(g));
  r.comp_w = inf(c.w.cwiseProduct(g));
  r.normalization = std::abs(c.w_star.sum() - 1.0);
  r.sign = std::max({neg(c.w_star), neg(c.u), neg(c.v), neg(c.w)});
  return r;
}

/// True iff the Farkas vector of a NotStationary certificate refutes its
/// system to tolerance.
inline bool verify_refutation(const StationarityCertificate& c, double tol) {
  return c.status == Status::NotStationary && poly::verify_farkas(c.system, c.farkas, tol);
}

struct CoderivativeMembership {
  bool member = false;
  Vec v;  // full length, zero off I_g
  bool formula_guaranteed = true;
};

/// Is x_query in D*Y(x, y)(y_star) = {A' v : -y_star = B' v, v >= 0, v _|_ g}?
inline CoderivativeMembership coderivative_Y_member(const BilevelProblem& pb, const Vec& x,
                                                    const Vec& y, const Vec& y_star,
                                                    const Vec& x_query,
                                                    const Tolerances& tol = {}) {
  require_dims(y_star.size() == pb.m && x_query.size() == pb.n,
               "coderivative_Y_member: wrong lengths");
  const ActiveSets act = detect_active_sets(pb, x, y, tol);
  CoderivativeMembership out;
  out.formula_guaranteed = cq::lower_mfcq(pb, x, y, tol).holds;
  out.v = Vec::Zero(pb.lower.k());
  const Index a = static_cast<Index>(act.I_g.size());
  const Mat Aact = cq::select_rows(pb.lower.A, act.I_g);
  const Mat Bact = cq::select_rows(pb.lower.B, act.I_g);
  LinearSystem S;
  S.E.resize(pb.m + pb.n, a);
  S.E << Bact.transpose(), Aact.transpose();
  S.f.resize(pb.m + pb.n);
  S.f << -y_star, x_query;
  S.nonneg.assign(static_cast<std::size_t>(a), 1);
  S.cost.assign(static_cast<std::size_t>(a), 1);
  if (a == 0) {
    out.member = y_star.cwiseAbs().maxCoeff() <= tol.feas &&
                 (x_query.size() == 0 || x_query.cwiseAbs().maxCoeff() <= tol.feas);
    return out;
  }
  auto lp = poly::lp_feasible_point(S.polyhedron(), tol);
  out.member = lp.status == poly::LpStatus::Optimal;
  if (out.member) {
    for (Index i = 0; i < a; ++i) out.v(act.I_g[static_cast<std::size_t>(i)]) = lp.minimizer(i);
  }
  return out;
}

/// The coderivative form of the conditions: both D*Y terms expanded through
/// the polyhedral formula, with their x-parts as separate unknowns xi1, xi2.
/// Unknowns (w*, v*, u, v, w, xi1, xi2).
inline KktSystem assemble_coderivative(const BilevelProblem& pb, const Vec& x, const Vec& y,
                                       const ActiveSets& act) {
  const Index n = pb.n, m = pb.m, p = pb.p, q = pb.q;
  const Index aG = static_cast<Index>(act.I_G.size());
  const Index ag = static_cast<Index>(act.I_g.size());
  const Mat J = pb.upper.jacobian(x, y);
  const Mat Gact = cq::select_rows(pb.upper_set.G, act.I_G);
  const Mat Aact = cq::select_rows(pb.lower.A, act.I_g);
  const Mat Bact = cq::select_rows(pb.lower.B, act.I_g);

  KktSystem out;
  out.active = act;
  auto& L = out.layout;
  L.w_star = 0;
  L.v_star = p;
  L.u = p + q;
  L.v = L.u + aG;
  L.w = L.v + ag;
  L.xi = L.w + ag;
  const Index N = L.xi + 2 * n;
  const Index rows = m + n + m + n + n + 1;
  LinearSystem& S = out.system;
  S.p = p;
  S.E = Mat::Zero(rows, N);
  S.f = Vec::Zero(rows);
  Index r = 0;
  // first coderivative: y* = -C' v*, so C' v* = B_act' v and xi1 = A_act' v
  S.E.block(r, L.v_star, m, q) = pb.lower.C.transpose();
  S.E.block(r, L.v, m, ag) = -Bact.transpose();
  r += m;
  S.E.block(r, L.xi, n, n) = Mat::Identity(n, n);
  S.E.block(r, L.v, n, ag) = -Aact.transpose();
  r += n;
  // second: y* = grad_y F' w* + C' v*, -y* = B_act' w and xi2 = A_act' w
  S.E.block(r, L.w_star, m, p) = J.rightCols(m).transpose();
  S.E.block(r, L.v_star, m, q) = pb.lower.C.transpose();
  S.E.block(r, L.w, m, ag) = Bact.transpose();
  r += m;
  S.E.block(r, L.xi + n, n, n) = Mat::Identity(n, n);
  S.E.block(r, L.w, n, ag) = -Aact.transpose();
  r += n;
  // 0 = grad_x F' w* + xi1 + xi2 + G_act' u
  S.E.block(r, L.w_star, n, p) = J.leftCols(n).transpose();
  S.E.block(r, L.xi, n, n) = Mat::Identity(n, n);
  S.E.block(r, L.xi + n, n, n) = Mat::Identity(n, n);
  S.E.block(r, L.u, n, aG) = Gact.transpose();
  r += n;
  S.E.block(r, L.w_star, 1, p).setOnes();
  S.f(r) = 1.0;

  S.nonneg.assign(static_cast<std::size_t>(N), 1);
  S.cost.assign(static_cast<std::size_t>(N), 1);
  for (Index j = 0; j < p; ++j) S.cost[static_cast<std::size_t>(j)] = 0;
  for (Index j = 0; j < q; ++j) S.nonneg[static_cast<std::size_t>(L.v_star + j)] = 0;
  for (Index j = 0; j < 2 * n; ++j) {
    S.nonneg[static_cast<std::size_t>(L.xi + j)] = 0;
    S.cost[static_cast<std::size_t>(L.xi + j)] = 0;
  }
  for (Index i = 0; i < m; ++i) S.row_labels.push_back("D*Y first, y[" + std::to_string(i) + "]");
  for (Index i = 0; i < n; ++i) S.row_labels.push_back("D*Y first, x[" + std::to_string(i) + "]");
  for (Index i = 0; i < m; ++i) S.row_labels.push_back("D*Y second, y[" + std::to_string(i) + "]");
  for (Index i = 0; i < n; ++i) S.row_labels.push_back("D*Y second, x[" + std::to_string(i) + "]");
  for (Index i = 0; i < n; ++i) S.row_labels.push_back("inclusion[" + std::to_string(i) + "]");
  S.row_labels.push_back("normalization");
  return out;
}

/// Certificate for the coderivative form; flags the result when either
/// regularity condition fails at the candidate.
inline StationarityCertificate check_coderivative_form(const BilevelProblem& pb, const Vec& x,
                                                       const Vec& y, const Tolerances& tol = {}) {
  auto cert = detail::certify_with(pb, x, y, tol, [&](const ActiveSets& a) {
    return assemble_coderivative(pb, x, y, a);
  });
  const bool up = cq::upper_mfcq(pb, x, tol).holds;
  const bool low = cq::lower_mfcq(pb, x, y, tol).holds;
  if (!up || !low) {
    cert.formula_guaranteed = false;
    cert.notes.push_back(std::string("formula not guaranteed: ") +
                         (!up ? "upper-level regularity fails" : "") +
                         (!up && !low ? ", " : "") +
                         (!low ? "lower-level regularity fails" : ""));
  }
  return cert;
}

}  // namespace mobilevel::stationarity
