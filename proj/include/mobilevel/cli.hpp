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

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mobilevel/cq.hpp"
#include "mobilevel/io.hpp"
#include "mobilevel/oracle.hpp"
#include "mobilevel/pareto.hpp"
#include "mobilevel/stationarity.hpp"

#ifndef MOBILEVEL_VERSION
#define MOBILEVEL_VERSION "0.0.0"
#endif

namespace mobilevel::cli {

using json = nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

inline Vec parse_vec(const std::string& text, const std::string& flag) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) {
      throw Error(ErrorKind::Parse, flag + ": '" + text + "' is not a comma-separated list of numbers");
    }
    vals.push_back(v);
  }
  if (vals.empty()) throw Error(ErrorKind::Parse, flag + ": empty vector");
  return to_vec(vals);
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v == 0.0 ? 0.0 : v);
  return buf;
}

inline std::string fmt(const Vec& v) {
  std::string s = "(";
  for (Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v(i));
  return s + ")";
}

inline std::string kind_id(ErrorKind k) {
  switch (k) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::Unbounded: return "Unbounded";
    case ErrorKind::IterationLimit: return "IterationLimit";
    case ErrorKind::GuardExceeded: return "GuardExceeded";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::VacuousSample: return "VacuousSample";
    case ErrorKind::InfeasibleCandidate: return "InfeasibleCandidate";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::UnknownTolerance: return "UnknownTolerance";
  }
  return "Unknown";
}

inline json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json index_list(const std::vector<Index>& idx) {
  json a = json::array();
  for (Index i : idx) a.push_back(i);
  return a;
}

inline json cq_json(const cq::CqReport& r) {
  json w = json::array();
  for (const auto& x : r.witnesses) {
    w.push_back({{"x", io::to_json(x.x)}, {"y", io::to_json(x.y)},
                 {"aux", x.aux.size() ? io::to_json(x.aux) : json(nullptr)},
                 {"value", num(x.value)}, {"what", x.what}});
  }
  json est = json::object();
  for (const auto& [k, v] : r.estimates) est[k] = num(v);
  return {{"condition", r.condition}, {"verdict", cq::to_string(r.verdict)},
          {"estimates", est},        {"witnesses", w},
          {"chain", r.chain},        {"notes", r.notes},
          {"samples", r.samples}};
}

struct Options {
  std::string problem;
  std::string x, y;
  std::string kind = "eff";
  double h = 0.0;
  double lambda = 1.0;
  int weight_grid = 11;
  double eff_tol = 1e-9;
  bool coderivative = false;
  bool json_out = false;
  std::vector<std::string> tol;
  long long seed = 0;
};

class Runner {
 public:
  Runner(std::string command, const Options& o, std::ostream& out)
      : cmd_(std::move(command)), o_(o), out_(out) {
    report_ = {{"command", cmd_},
               {"version", MOBILEVEL_VERSION},
               {"problem", o_.problem},
               {"seed", o_.seed},
               {"inputs",
                {{"x", nullptr}, {"y", nullptr}, {"kind", nullptr}, {"h", nullptr},
                 {"lambda", nullptr}, {"weight_grid", nullptr},
                 {"coderivative_form", nullptr}}},
               {"tolerances", nullptr},
               {"status", nullptr},
               {"exit_code", nullptr},
               {"verdict", nullptr},
               {"front", nullptr},
               {"efficient_set", nullptr},
               {"cq", nullptr},
               {"mfcq", nullptr},
               {"certificate", nullptr},
               {"oracle", nullptr},
               {"diagnostics", json::array()},
               {"warnings", json::array()},
               {"error", nullptr}};
  }

  int run() {
    int code = kExitOk;
    try {
      load_tolerances();
      report_["tolerances"] = io::tolerances_json(tol_);
      pf_ = io::load_problem(o_.problem);
      code = dispatch();
    } catch (const Error& e) {
      code = e.kind() == ErrorKind::IterationLimit ? kExitNumerical : kExitInput;
      report_["error"] = {{"kind", kind_id(e.kind())}, {"message", e.what()}};
      text_ << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    } catch (const std::exception& e) {
      code = kExitInput;
      report_["error"] = {{"kind", "Parse"}, {"message", e.what()}};
      text_ << "error: " << e.what() << "\n";
    }
    report_["exit_code"] = code;
    report_["status"] = code == kExitOk         ? "ok"
                        : code == kExitNegative ? "negative"
                        : code == kExitInput    ? "input-error"
                                                : "numerical-failure";
    if (o_.json_out) {
      out_ << report_.dump(2) << "\n";
    } else {
      out_ << text_.str();
    }
    return code;
  }

  const json& report() const { return report_; }

 private:
  void load_tolerances() {
    if (const char* path = std::getenv("MOBILEVEL_TOL_FILE"); path && *path) {
      io::apply_tolerances(io::parse_text(io::read_file(path), path), tol_, path);
    }
    for (const auto& entry : o_.tol) {
      const auto eq = entry.find('=');
      if (eq == std::string::npos) throw Error(ErrorKind::Parse, "--tol expects name=value");
      const std::string name = entry.substr(0, eq);
      const Vec v = parse_vec(entry.substr(eq + 1), "--tol " + name);
      tol_.set(name, v(0));
    }
  }

  const BilevelProblem& pb() const { return pf_.problem; }

  Vec need_x() {
    if (o_.x.empty()) throw Error(ErrorKind::Parse, cmd_ + " requires --x");
    Vec x = parse_vec(o_.x, "--x");
    require_dims(x.size() == pb().n, "--x must have n = " + std::to_string(pb().n) + " entries");
    report_["inputs"]["x"] = io::to_json(x);
    return x;
  }

  Vec need_y() {
    if (o_.y.empty()) throw Error(ErrorKind::Parse, cmd_ + " requires --y");
    Vec y = parse_vec(o_.y, "--y");
    require_dims(y.size() == pb().m, "--y must have m = " + std::to_string(pb().m) + " entries");
    report_["inputs"]["y"] = io::to_json(y);
    return y;
  }

  EfficiencyKind kind() {
    report_["inputs"]["kind"] = o_.kind;
    if (o_.kind == "eff") return EfficiencyKind::Pareto;
    if (o_.kind == "weff") return EfficiencyKind::WeakPareto;
    throw Error(ErrorKind::Parse, "--kind must be eff or weff");
  }

  io::Sampling need_sampling() {
    if (!pf_.sampling) throw Error(ErrorKind::Parse, "sampling: block required by " + cmd_);
    io::Sampling s = *pf_.sampling;
    if (o_.h > 0) s.h = o_.h;
    report_["inputs"]["h"] = s.h;
    return s;
  }

  void warn(const std::string& w) {
    report_["warnings"].push_back(w);
    text_ << "warning: " << w << "\n";
  }

  int dispatch() {
    if (cmd_ == "front") return front();
    if (cmd_ == "solset") return solset();
    if (cmd_ == "uwsm") return uwsm();
    if (cmd_ == "rreg") return rreg();
    if (cmd_ == "domination") return domination();
    if (cmd_ == "nonlinear-cq") return nonlinear_cq();
    if (cmd_ == "mfcq") return mfcq();
    if (cmd_ == "gvfcq") return gvfcq();
    if (cmd_ == "stationarity") return stationarity_cmd();
    if (cmd_ == "oracle-front") return oracle_front();
    if (cmd_ == "oracle-bilevel") return oracle_bilevel();
    if (cmd_ == "validate") return validate();
    throw Error(ErrorKind::Parse, "unknown command " + cmd_);
  }

  int front() {
    const Vec x = need_x();
    const auto k = kind();
    const auto f = pareto::frontier_map(pb().lower, x, k, tol_);
    json faces = json::array(), weights = json::array();
    for (const auto& face : f.faces) {
      json vs = json::array();
      for (const auto& v : face.vertices) vs.push_back(io::to_json(v));
      faces.push_back(vs);
    }
    for (const auto& w : f.weights) weights.push_back(io::to_json(w.alpha()));
    json verts = json::array();
    for (const auto& v : f.vertices) verts.push_back(io::to_json(v));
    report_["front"] = {{"kind", to_string(k)}, {"vertices", verts}, {"faces", faces},
                        {"weights", weights}, {"approximate", f.approximate}};
    if (f.approximate) warn("three or more objectives: grid approximation of the front");
    text_ << "front at x = " << fmt(x) << " (" << to_string(k) << ")\n";
    for (const auto& v : f.vertices) text_ << "  vertex " << fmt(v) << "\n";
    return kExitOk;
  }

  int solset() {
    const Vec x = need_x();
    const auto s = pareto::efficient_set(pb().lower, x, tol_);
    json faces = json::array();
    text_ << "efficient set at x = " << fmt(x) << "\n";
    for (std::size_t i = 0; i < s.faces.size(); ++i) {
      json vs = json::array();
      text_ << "  face " << i;
      if (i < s.weights.size()) text_ << " weight " << fmt(s.weights[i].alpha());
      text_ << ":";
      for (const auto& v : s.faces[i].vertices) {
        vs.push_back(io::to_json(v));
        text_ << " " << fmt(v);
      }
      text_ << "\n";
      faces.push_back({{"vertices", vs},
                       {"weight", i < s.weights.size() ? io::to_json(s.weights[i].alpha())
                                                       : json(nullptr)}});
    }
    report_["efficient_set"] = {{"faces", faces}, {"approximate", s.approximate}};
    return kExitOk;
  }

  int emit_cq(const cq::CqReport& r) {
    report_["cq"] = cq_json(r);
    report_["verdict"] = cq::to_string(r.verdict);
    text_ << r.condition << ": " << cq::to_string(r.verdict) << "\n";
    for (const auto& [k, v] : r.estimates) text_ << "  " << k << " = " << fmt(v) << "\n";
    for (const auto& w : r.witnesses) {
      text_ << "  witness x = " << fmt(w.x) << ", y = " << fmt(w.y);
      if (w.aux.size()) text_ << ", aux = " << fmt(w.aux);
      text_ << " (" << w.what << ")\n";
    }
    if (!r.chain.empty()) {
      text_ << "  chain:";
      for (std::size_t i = 0; i < r.chain.size(); ++i) text_ << (i ? " -> " : " ") << r.chain[i];
      text_ << "\n";
    }
    for (const auto& n : r.notes) text_ << "  note: " << n << "\n";
    const bool positive = r.verdict == cq::Verdict::CertifiedSufficient ||
                          r.verdict == cq::Verdict::SampleConsistent;
    return positive ? kExitOk : kExitNegative;
  }

  int uwsm() { return emit_cq(cq::estimate_uwsm_lambda(pb(), need_sampling().region(), tol_)); }
  int rreg() { return emit_cq(cq::estimate_rreg_sigma(pb(), need_sampling().region(), tol_)); }
  int domination() { return emit_cq(cq::check_strong_domination(pb(), need_x(), tol_)); }

  int nonlinear_cq() {
    const Vec x = need_x();
    const Vec y = need_y();
    report_["inputs"]["lambda"] = o_.lambda;
    report_["inputs"]["weight_grid"] = o_.weight_grid;
    return emit_cq(cq::check_nonlinear_cq(pb(), x, y, o_.lambda, o_.weight_grid, tol_));
  }

  int mfcq() {
    const Vec x = need_x();
    const auto up = cq::upper_mfcq(pb(), x, tol_);
    json j = {{"upper", {{"holds", up.holds}, {"active", index_list(up.active)},
                         {"margin", num(up.margin)}, {"direction", io::to_json(up.direction)}}},
              {"lower", nullptr}};
    text_ << "upper-level regularity at x = " << fmt(x) << ": " << (up.holds ? "holds" : "fails")
          << " (margin " << fmt(up.margin) << ")\n";
    bool ok = up.holds;
    if (!o_.y.empty()) {
      const Vec y = need_y();
      const auto low = cq::lower_mfcq(pb(), x, y, tol_);
      j["lower"] = {{"holds", low.holds}, {"active", index_list(low.active)},
                    {"margin", num(low.margin)}, {"direction", io::to_json(low.direction)}};
      text_ << "lower-level regularity at y = " << fmt(y) << ": "
            << (low.holds ? "holds" : "fails") << " (margin " << fmt(low.margin) << ")\n";
      ok = ok && low.holds;
    }
    report_["mfcq"] = j;
    return ok ? kExitOk : kExitNegative;
  }

  int gvfcq() {
    const Vec x = need_x();
    const Vec y = need_y();
    cq::GvfcqConfig cfg;
    for (const auto& c : pf_.candidates) cfg.xs.push_back(c.x);
    if (!cfg.xs.empty()) cfg.xs.push_back(x);
    if (pf_.sampling) cfg.region = need_sampling().region();
    return emit_cq(cq::gvfcq_verdict(pb(), x, y, cfg, tol_));
  }

  int stationarity_cmd() {
    const Vec x = need_x();
    const Vec y = need_y();
    report_["inputs"]["coderivative_form"] = o_.coderivative;
    const auto c = o_.coderivative ? stationarity::check_coderivative_form(pb(), x, y, tol_)
                                   : stationarity::certify(pb(), x, y, tol_);
    const bool ok = c.status == stationarity::Status::Stationary;
    json j = {{"status", stationarity::to_string(c.status)},
              {"I_G", index_list(c.active.I_G)},
              {"I_g", index_list(c.active.I_g)},
              {"formula_guaranteed", c.formula_guaranteed},
              {"notes", c.notes},
              {"w_star", nullptr}, {"v_star", nullptr}, {"u", nullptr}, {"v", nullptr},
              {"w", nullptr}, {"residuals", nullptr}, {"farkas", nullptr},
              {"farkas_verified", nullptr}};
    text_ << "candidate x = " << fmt(x) << ", y = " << fmt(y) << ": "
          << stationarity::to_string(c.status) << "\n";
    if (ok) {
      const auto r = stationarity::residuals(pb(), x, y, c);
      j["w_star"] = io::to_json(c.w_star);
      j["v_star"] = io::to_json(c.v_star);
      j["u"] = io::to_json(c.u);
      j["v"] = io::to_json(c.v);
      j["w"] = io::to_json(c.w);
      j["residuals"] = {{"lower_adjoint", r.lower_adjoint}, {"stationarity", r.stationarity},
                        {"comp_u", r.comp_u}, {"comp_v", r.comp_v}, {"comp_w", r.comp_w},
                        {"normalization", r.normalization}, {"sign", r.sign},
                        {"max", r.max()}};
      text_ << "  w* = " << fmt(c.w_star) << "\n  v* = " << fmt(c.v_star) << "\n  u  = "
            << fmt(c.u) << "\n  v  = " << fmt(c.v) << "\n  w  = " << fmt(c.w)
            << "\n  max residual " << fmt(r.max()) << "\n";
    } else {
      const bool verified = stationarity::verify_refutation(c, tol_.cert);
      j["farkas"] = io::to_json(c.farkas);
      j["farkas_verified"] = verified;
      text_ << "  Farkas vector " << fmt(c.farkas) << (verified ? " (verified)" : " (NOT verified)")
            << "\n";
    }
    for (const auto& n : c.notes) text_ << "  note: " << n << "\n";
    report_["certificate"] = j;
    report_["verdict"] = stationarity::to_string(c.status);
    return ok ? kExitOk : kExitNegative;
  }

  int oracle_front() {
    const Vec x = need_x();
    const auto k = kind();
    Vec lo, hi;
    double h = o_.h > 0 ? o_.h : 0.05;
    if (pf_.sampling) {
      lo = pf_.sampling->y_lower;
      hi = pf_.sampling->y_upper;
      if (!(o_.h > 0)) h = pf_.sampling->h;
    } else {
      const auto Y = pareto::feasible_set(pb().lower, x);
      lo.resize(pb().m);
      hi.resize(pb().m);
      for (Index i = 0; i < pb().m; ++i) {
        Vec c = Vec::Zero(pb().m);
        c(i) = 1.0;
        auto a = poly::lp_solve(c, Y, tol_);
        auto b = poly::lp_solve(-c, Y, tol_);
        if (a.status != poly::LpStatus::Optimal || b.status != poly::LpStatus::Optimal) {
          throw Error(ErrorKind::Unbounded, "no sampling.y_box and Y(x) has no bounding box");
        }
        lo(i) = a.value;
        hi(i) = -b.value;
      }
      warn("no sampling.y_box; grid spans the bounding box of Y(x)");
    }
    report_["inputs"]["h"] = h;
    const auto g = oracle::grid_front(pb().lower, x, oracle::GridSpec{lo, hi, h}, k, tol_);
    json pts = json::array(), pre = json::array();
    for (const auto& p : g.points) pts.push_back(io::to_json(p));
    for (const auto& p : g.preimages) pre.push_back(io::to_json(p));
    report_["oracle"] = {{"points", pts}, {"preimages", pre},
                         {"feasible_samples", g.feasible_count}, {"pairs", nullptr}};
    for (const auto& w : g.warnings) warn(w);
    text_ << "grid front at x = " << fmt(x) << ", h = " << fmt(h) << ": " << g.points.size()
          << " points from " << g.feasible_count << " feasible samples\n";
    for (const auto& p : g.points) text_ << "  " << fmt(p) << "\n";
    return kExitOk;
  }

  int oracle_bilevel() {
    const auto s = need_sampling();
    const Index n = pb().n, m = pb().m;
    Vec lo(n + m), hi(n + m);
    lo << s.x_lower, s.y_lower;
    hi << s.x_upper, s.y_upper;
    report_["inputs"]["kind"] = o_.kind;
    const auto k = kind();
    const auto pts = oracle::grid_bilevel_efficient(pb(), oracle::GridSpec{lo, hi, s.h}, k,
                                                    o_.eff_tol, tol_);
    json pairs = json::array();
    text_ << "grid bilevel points (h = " << fmt(s.h) << "): " << pts.size() << "\n";
    for (const auto& p : pts) {
      pairs.push_back({{"x", io::to_json(p.x)}, {"y", io::to_json(p.y)}, {"F", io::to_json(p.F)}});
      text_ << "  x = " << fmt(p.x) << ", y = " << fmt(p.y) << ", F = " << fmt(p.F) << "\n";
    }
    report_["oracle"] = {{"points", nullptr}, {"preimages", nullptr},
                         {"feasible_samples", nullptr}, {"pairs", pairs}};
    return kExitOk;
  }

  void diag(const std::string& d) {
    report_["diagnostics"].push_back(d);
    text_ << d << "\n";
  }

  int validate() {
    // parse already ran the dimension cross-checks
    std::vector<Vec> xs;
    for (const auto& c : pf_.candidates) xs.push_back(c.x);
    if (pf_.sampling) xs.push_back(pf_.sampling->x_lower);
    if (xs.empty() && pb().upper_set.rows() > 0) {
      auto lp = poly::lp_feasible_point({pb().upper_set.G, pb().upper_set.h}, tol_);
      if (lp.status == poly::LpStatus::Optimal) xs.push_back(lp.minimizer);
    }
    if (xs.empty()) xs.push_back(Vec::Zero(pb().n));
    bool bounded = true;
    for (const auto& x : xs) {
      try {
        if (!poly::is_bounded(pareto::feasible_set(pb().lower, x), tol_)) {
          bounded = false;
          warn("Y(x) unbounded at x = " + fmt(x));
        }
      } catch (const Error&) {
        bounded = false;
        warn("Y(x) empty at x = " + fmt(x));
      }
      if (!cq::check_upper_mfcq(pb(), x, tol_)) warn("upper-level regularity fails at x = " + fmt(x));
    }
    for (const auto& c : pf_.candidates) {
      if (pb().lower.constraints(c.x, c.y).maxCoeff() <= tol_.feas &&
          !cq::check_lower_mfcq(pb(), c.x, c.y, tol_)) {
        warn("lower-level regularity fails at candidate x = " + fmt(c.x) + ", y = " + fmt(c.y));
      }
    }
    std::string msg = "valid";
    msg += bounded ? "; Y(x) bounded at sampled x" : "; Y(x) not bounded at every sampled x";
    msg += pb().q <= 2 ? "; q=" + std::to_string(pb().q) + " exact path available"
                       : "; q=" + std::to_string(pb().q) + " exact path unavailable (grid approximation)";
    diag(msg);
    report_["verdict"] = "valid";
    return kExitOk;
  }

  std::string cmd_;
  Options o_;
  std::ostream& out_;
  Tolerances tol_;
  io::ProblemFile pf_;
  json report_;
  std::ostringstream text_;
};

/// Parses the command line and runs one command. Returns the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiobjective bilevel analysis: fronts, constraint qualifications, "
               "stationarity certificates"};
  app.set_version_flag("--version", std::string(MOBILEVEL_VERSION));
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_flag("--json", o.json_out, "machine-readable report");
  app.add_option("--tol", o.tol, "override a tolerance, name=value (repeatable)");
  app.add_option("--seed", o.seed, "seed echoed in the report");
  app.add_option("--h", o.h, "grid step; overrides sampling.h");

  struct Spec {
    const char* name;
    const char* help;
    bool x, y, kind;
  };
  const Spec specs[] = {
      {"front", "frontier map at x", true, false, true},
      {"solset", "efficient solution set at x", true, false, false},
      {"uwsm", "estimate the uniform weak sharp minimum modulus", false, false, false},
      {"rreg", "estimate the R-regularity constant", false, false, false},
      {"domination", "strong domination property at x", true, false, false},
      {"nonlinear-cq", "normal-cone sufficient condition at (x, y)", true, true, false},
      {"mfcq", "upper- (and lower-) level regularity", true, true, false},
      {"gvfcq", "GVFCQ verdict from the sufficient conditions", true, true, false},
      {"stationarity", "stationarity certificate at (x, y)", true, true, false},
      {"oracle-front", "grid front at x", true, false, true},
      {"oracle-bilevel", "grid enumeration of bilevel efficient points", false, false, true},
      {"validate", "check a problem file", false, false, false},
  };
  for (const auto& s : specs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("problem", o.problem, "problem file (JSON)")->required();
    if (s.x) sub->add_option("--x", o.x, "upper-level point, comma-separated");
    if (s.y) sub->add_option("--y", o.y, "lower-level point, comma-separated");
    if (s.kind) sub->add_option("--kind", o.kind, "eff or weff");
    if (std::string(s.name) == "stationarity") {
      sub->add_flag("--coderivative-form", o.coderivative, "use the coderivative form");
    }
    if (std::string(s.name) == "nonlinear-cq") {
      sub->add_option("--lambda", o.lambda, "modulus lambda");
      sub->add_option("--weight-grid", o.weight_grid, "points per simplex axis");
    }
    if (std::string(s.name) == "oracle-bilevel") {
      sub->add_option("--eff-tol", o.eff_tol, "distance to the grid front counted as efficient");
    }
  }

  std::vector<std::string> argv_store = {"mobilevel"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }
  std::string command;
  for (auto* sub : app.get_subcommands()) command = sub->get_name();
  Runner runner(command, o, out);
  const int code = runner.run();
  if (code == kExitInput || code == kExitNumerical) {
    err << "mobilevel " << command << ": " << runner.report()["error"]["message"].get<std::string>()
        << "\n";
  }
  return code;
}

}  // namespace mobilevel::cli
