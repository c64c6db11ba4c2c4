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

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mobilevel/core.hpp"
#include "mobilevel/cq.hpp"
#include "mobilevel/model.hpp"
#include "mobilevel/tolerances.hpp"

namespace mobilevel::io {

using json = nlohmann::json;

struct Sampling {
  Vec x_lower, x_upper;
  Vec y_lower, y_upper;
  double h = 0.05;

  cq::SampledRegion region() const { return {x_lower, x_upper, y_lower, y_upper, h}; }
};

struct Candidate {
  Vec x;
  Vec y;
};

struct ProblemFile {
  BilevelProblem problem;
  std::optional<Sampling> sampling;
  std::vector<Candidate> candidates;
};

inline json to_json(const Vec& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i) == 0.0 ? 0.0 : v(i));  // no -0
  return a;
}

inline json to_json(const Mat& M) {
  json a = json::array();
  for (Index i = 0; i < M.rows(); ++i) a.push_back(to_json(Vec(M.row(i).transpose())));
  return a;
}

namespace detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::Parse, path + ": " + what);
}

inline const json& child(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

inline Index count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 1) fail(path, "expected a positive integer");
  return static_cast<Index>(j.get<long long>());
}

inline Vec vector(const json& j, const std::string& path, Index expect = -1) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  if (expect >= 0 && static_cast<Index>(j.size()) != expect) {
    fail(path, "expected " + std::to_string(expect) + " entries, found " +
                   std::to_string(j.size()));
  }
  Vec v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Index>(i)) = number(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

// rows < 0 accepts any row count.
inline Mat matrix(const json& j, const std::string& path, Index rows, Index cols) {
  if (!j.is_array()) fail(path, "expected an array of rows");
  if (rows >= 0 && static_cast<Index>(j.size()) != rows) {
    fail(path, "expected " + std::to_string(rows) + " rows, found " + std::to_string(j.size()));
  }
  Mat M(static_cast<Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    M.row(static_cast<Index>(i)) =
        vector(j[i], path + "[" + std::to_string(i) + "]", cols).transpose();
  }
  return M;
}

inline std::pair<Vec, Vec> box(const json& j, const std::string& path, Index dim) {
  Vec lo = vector(child(j, "lower", path), path + ".lower", dim);
  Vec hi = vector(child(j, "upper", path), path + ".upper", dim);
  for (Index i = 0; i < dim; ++i) {
    if (!(lo(i) <= hi(i))) fail(path, "lower must not exceed upper");
  }
  return {lo, hi};
}

}  // namespace detail

/// Builds a problem from its JSON document; errors name the key path.
inline ProblemFile parse_problem(const json& doc) {
  using namespace detail;
  ProblemFile pf;
  auto& pb = pf.problem;
  const json& dims = child(doc, "dims", "");
  pb.n = count(child(dims, "n", "dims"), "dims.n");
  pb.m = count(child(dims, "m", "dims"), "dims.m");
  pb.p = count(child(dims, "p", "dims"), "dims.p");
  pb.q = count(child(dims, "q", "dims"), "dims.q");
  const Index nm = pb.n + pb.m;

  const json& F = child(child(doc, "upper", ""), "F", "upper");
  if (!F.is_array()) fail("upper.F", "expected an array of components");
  if (static_cast<Index>(F.size()) != pb.p) {
    fail("upper.F", "expected p = " + std::to_string(pb.p) + " components, found " +
                        std::to_string(F.size()));
  }
  for (std::size_t k = 0; k < F.size(); ++k) {
    const std::string path = "upper.F[" + std::to_string(k) + "]";
    QuadraticForm f;
    f.Q = F[k].contains("Q") ? matrix(F[k]["Q"], path + ".Q", nm, nm) : Mat(Mat::Zero(nm, nm));
    if (!f.Q.isApprox(f.Q.transpose()) && !f.Q.isZero(0.0)) fail(path + ".Q", "must be symmetric");
    f.c = vector(child(F[k], "c", path), path + ".c", nm);
    f.b = F[k].contains("b") ? number(F[k]["b"], path + ".b") : 0.0;
    pb.upper.components.push_back(std::move(f));
  }

  if (doc.contains("X")) {
    const json& X = doc["X"];
    pb.upper_set.G = matrix(child(X, "G", "X"), "X.G", -1, pb.n);
    pb.upper_set.h = vector(child(X, "h", "X"), "X.h", pb.upper_set.G.rows());
  } else {
    pb.upper_set = {Mat(0, pb.n), Vec(0)};
  }

  const json& L = child(doc, "lower", "");
  auto& ll = pb.lower;
  ll.d = vector(child(L, "d", "lower"), "lower.d");
  const Index k = ll.d.size();
  ll.C = matrix(child(L, "C", "lower"), "lower.C", pb.q, pb.m);
  ll.A = matrix(child(L, "A", "lower"), "lower.A", k, pb.n);
  ll.B = matrix(child(L, "B", "lower"), "lower.B", k, pb.m);
  ll.D = L.contains("D") ? matrix(L["D"], "lower.D", pb.q, pb.n) : Mat(Mat::Zero(pb.q, pb.n));
  ll.e = L.contains("e") ? vector(L["e"], "lower.e", pb.q) : Vec(Vec::Zero(pb.q));
  pb.validate();

  if (doc.contains("sampling")) {
    const json& S = doc["sampling"];
    Sampling s;
    std::tie(s.x_lower, s.x_upper) = box(child(S, "x_box", "sampling"), "sampling.x_box", pb.n);
    std::tie(s.y_lower, s.y_upper) = box(child(S, "y_box", "sampling"), "sampling.y_box", pb.m);
    s.h = number(child(S, "h", "sampling"), "sampling.h");
    if (!(s.h > 0)) fail("sampling.h", "must be positive");
    pf.sampling = s;
  }
  if (doc.contains("candidates")) {
    const json& C = doc["candidates"];
    if (!C.is_array()) fail("candidates", "expected an array");
    for (std::size_t i = 0; i < C.size(); ++i) {
      const std::string path = "candidates[" + std::to_string(i) + "]";
      pf.candidates.push_back({vector(child(C[i], "x", path), path + ".x", pb.n),
                               vector(child(C[i], "y", path), path + ".y", pb.m)});
    }
  }
  return pf;
}

/// JSON text with // and /* */ comments allowed.
inline json parse_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, origin + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ProblemFile load_problem(const std::string& path) {
  return parse_problem(parse_text(read_file(path), path));
}

inline json serialize(const ProblemFile& pf) {
  const auto& pb = pf.problem;
  json doc;
  doc["dims"] = {{"n", pb.n}, {"m", pb.m}, {"p", pb.p}, {"q", pb.q}};
  json F = json::array();
  for (const auto& f : pb.upper.components) {
    F.push_back({{"Q", to_json(f.Q)}, {"c", to_json(f.c)}, {"b", f.b}});
  }
  doc["upper"] = {{"F", F}};
  doc["X"] = {{"G", to_json(pb.upper_set.G)}, {"h", to_json(pb.upper_set.h)}};
  doc["lower"] = {{"C", to_json(pb.lower.C)}, {"D", to_json(pb.lower.D)},
                  {"e", to_json(pb.lower.e)}, {"A", to_json(pb.lower.A)},
                  {"B", to_json(pb.lower.B)}, {"d", to_json(pb.lower.d)}};
  if (pf.sampling) {
    const auto& s = *pf.sampling;
    doc["sampling"] = {{"x_box", {{"lower", to_json(s.x_lower)}, {"upper", to_json(s.x_upper)}}},
                       {"y_box", {{"lower", to_json(s.y_lower)}, {"upper", to_json(s.y_upper)}}},
                       {"h", s.h}};
  }
  if (!pf.candidates.empty()) {
    json C = json::array();
    for (const auto& c : pf.candidates) C.push_back({{"x", to_json(c.x)}, {"y", to_json(c.y)}});
    doc["candidates"] = C;
  }
  return doc;
}

/// Applies {"name": value, ...} overrides.
inline void apply_tolerances(const json& j, Tolerances& tol, const std::string& origin) {
  if (!j.is_object()) throw Error(ErrorKind::Parse, origin + ": expected an object");
  for (const auto& [name, value] : j.items()) {
    if (!value.is_number()) throw Error(ErrorKind::Parse, origin + "." + name + ": expected a number");
    tol.set(name, value.get<double>());
  }
}

inline json tolerances_json(const Tolerances& tol) {
  json j = json::object();
  for (const auto& entry : Tolerances::table()) j[entry.first] = tol.get(entry.first);
  return j;
}

}  // namespace mobilevel::io
