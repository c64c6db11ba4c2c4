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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mobilevel/cli.hpp"

namespace mobilevel {
namespace {

using nlohmann::json;

const std::string kMaterial = std::string(MOBILEVEL_DATA_DIR) + "/material_example.json";

struct Outcome {
  int code;
  std::string out, err;
  json report() const { return json::parse(out); }
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("mobilevel_" + name);
  std::ofstream(path) << text;
  return path.string();
}

json material_json() { return io::parse_text(io::read_file(kMaterial), kMaterial); }

std::set<std::string> keys(const json& j) {
  std::set<std::string> k;
  for (auto it = j.begin(); it != j.end(); ++it) k.insert(it.key());
  return k;
}

TEST(Cli, FrontOfMaterialExampleIsSinglePoint) {
  auto r = run({"front", kMaterial, "--x", "4,3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("vertex (2, 2)"), std::string::npos) << r.out;
  auto j = run({"--json", "front", kMaterial, "--x", "4,3"}).report();
  ASSERT_EQ(j["front"]["vertices"].size(), 1u);
  EXPECT_NEAR(j["front"]["vertices"][0][0].get<double>(), 2.0, 1e-9);
  EXPECT_NEAR(j["front"]["vertices"][0][1].get<double>(), 2.0, 1e-9);
}

TEST(Cli, StationaryCandidateExitsZeroWithMultipliers) {
  auto r = run({"stationarity", kMaterial, "--x", "4,3", "--y", "1,2", "--json"});
  ASSERT_EQ(r.code, 0) << r.out;
  const json c = r.report()["certificate"];
  EXPECT_EQ(c["status"], "Stationary");
  const std::vector<double> w = c["w"].get<std::vector<double>>();
  const std::vector<double> expect = {0, 0.5, 0, 0.5, 0, 0};
  ASSERT_EQ(w.size(), expect.size());
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(w[i], expect[i], 1e-8);
  EXPECT_LE(c["residuals"]["max"].get<double>(), 1e-8);
  EXPECT_EQ(c["I_g"], json::array({1, 3}));
}

TEST(Cli, NonStationaryCandidateExitsOneWithVerifiedFarkas) {
  auto r = run({"--json", "stationarity", kMaterial, "--x", "5,4", "--y", "1,2"});
  EXPECT_EQ(r.code, 1);
  const json j = r.report();
  EXPECT_EQ(j["verdict"], "NotStationary");
  EXPECT_TRUE(j["certificate"]["farkas_verified"].get<bool>());
  EXPECT_TRUE(j["certificate"]["w"].is_null());
}

TEST(Cli, InfeasibleCandidateIsInputError) {
  auto r = run({"--json", "stationarity", kMaterial, "--x", "4,3", "--y", "0,2"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.report()["error"]["kind"], "InfeasibleCandidate");
}

TEST(Cli, WrongRowCountInLowerBNamesThePath) {
  json doc = material_json();
  doc["lower"]["B"].erase(doc["lower"]["B"].size() - 1);
  const auto path = temp_file("bad_b.json", doc.dump());
  auto r = run({"front", path, "--x", "4,3"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("lower.B"), std::string::npos) << r.err;
}

TEST(Cli, WrongComponentCountInUpperFNamesThePath) {
  json doc = material_json();
  doc["upper"]["F"].erase(1);
  const auto path = temp_file("bad_f.json", doc.dump());
  auto r = run({"--json", "validate", path});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.report()["error"]["kind"], "Parse");
  EXPECT_NE(r.report()["error"]["message"].get<std::string>().find("upper.F"),
            std::string::npos);
}

TEST(Cli, MalformedJsonAndMissingFileAreInputErrors) {
  EXPECT_EQ(run({"validate", temp_file("broken.json", "{\"dims\": ")}).code, 2);
  EXPECT_EQ(run({"validate", "/nonexistent/problem.json"}).code, 2);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({"no-such-command", kMaterial}).code, 2);
  EXPECT_EQ(run({"front", kMaterial}).code, 2);              // --x missing
  EXPECT_EQ(run({"front", kMaterial, "--x", "4"}).code, 2);  // wrong length
  EXPECT_EQ(run({"front", kMaterial, "--x", "4,a"}).code, 2);
  EXPECT_EQ(run({"front", kMaterial, "--x", "4,3", "--kind", "strict"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST(Cli, UnknownToleranceIsRejected) {
  auto r = run({"--json", "--tol", "bogus=1e-3", "validate", kMaterial});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.report()["error"]["kind"], "UnknownTolerance");
}

TEST(Cli, ToleranceOverridesFromFlagAndFile) {
  auto j = run({"--json", "--tol", "act=1e-5", "validate", kMaterial}).report();
  EXPECT_DOUBLE_EQ(j["tolerances"]["act"].get<double>(), 1e-5);

  const auto path = temp_file("tol.json", R"({"face": 2e-6, "act": 3e-6})");
  ::setenv("MOBILEVEL_TOL_FILE", path.c_str(), 1);
  auto k = run({"--json", "--tol", "act=1e-5", "validate", kMaterial}).report();
  ::unsetenv("MOBILEVEL_TOL_FILE");
  EXPECT_DOUBLE_EQ(k["tolerances"]["face"].get<double>(), 2e-6);
  EXPECT_DOUBLE_EQ(k["tolerances"]["act"].get<double>(), 1e-5);  // flag wins
}

TEST(Cli, UnboundedLowerLevelIsInputError) {
  json doc = material_json();
  // drop y1 <= 4 and y1 <= x1, so y1 is unbounded above and the C row 2 y1 still bounded below
  doc["lower"]["C"] = json::array({json::array({-1, 0}), json::array({0, 1})});
  doc["lower"]["B"][0] = json::array({0, 0});
  doc["lower"]["B"][4] = json::array({0, 0});
  const auto path = temp_file("unbounded.json", doc.dump());
  auto r = run({"--json", "front", path, "--x", "4,3"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.report()["error"]["kind"], "Unbounded");
}

TEST(Cli, ValidateReportsBoundednessAndExactPath) {
  auto r = run({"validate", kMaterial});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("valid; Y(x) bounded at sampled x; q=2 exact path available"),
            std::string::npos)
      << r.out;
}

TEST(Cli, CqCommandsProduceVerdicts) {
  auto g = run({"--json", "gvfcq", kMaterial, "--x", "4,3", "--y", "1,2"});
  EXPECT_EQ(g.code, 0);
  EXPECT_EQ(g.report()["verdict"], "CertifiedSufficient");
  auto d = run({"--json", "domination", kMaterial, "--x", "5,4"});
  EXPECT_EQ(d.code, 0);
  auto u = run({"--json", "--h", "0.5", "uwsm", kMaterial});
  EXPECT_EQ(u.code, 0);
  EXPECT_GT(u.report()["cq"]["estimates"]["lambda"].get<double>(), 0.0);
  auto m = run({"--json", "mfcq", kMaterial, "--x", "4,3", "--y", "1,2"});
  EXPECT_EQ(m.code, 0);
  EXPECT_TRUE(m.report()["mfcq"]["lower"]["holds"].get<bool>());
}

TEST(Cli, ReportKeysAreStableAcrossCommandsAndOutcomes) {
  const std::vector<std::vector<std::string>> cases = {
      {"validate", kMaterial},
      {"front", kMaterial, "--x", "4,3"},
      {"solset", kMaterial, "--x", "4,3"},
      {"stationarity", kMaterial, "--x", "4,3", "--y", "1,2"},
      {"stationarity", kMaterial, "--x", "5,4", "--y", "1,2"},
      {"domination", kMaterial, "--x", "5,4"},
      {"oracle-front", kMaterial, "--x", "4,3", "--h", "0.5"},
      {"front", "/nonexistent.json", "--x", "4,3"},
  };
  std::set<std::string> first;
  for (auto args : cases) {
    args.insert(args.begin(), "--json");
    const auto r = run(args);
    const json j = r.report();
    EXPECT_FALSE(j.contains("elapsed"));
    if (first.empty()) {
      first = keys(j);
    } else {
      EXPECT_EQ(keys(j), first) << args[1];
    }
    EXPECT_EQ(keys(j["inputs"]).size(), 7u);
    EXPECT_EQ(j["exit_code"].get<int>(), r.code);
  }
  // identical inputs give byte-identical reports
  EXPECT_EQ(run({"--json", "solset", kMaterial, "--x", "4,3"}).out,
            run({"--json", "solset", kMaterial, "--x", "4,3"}).out);
}

TEST(Cli, ProblemFileRoundTrip) {
  const auto pf = io::load_problem(kMaterial);
  const json once = io::serialize(pf);
  const auto back = io::parse_problem(once);
  EXPECT_EQ(io::serialize(back), once);
  EXPECT_TRUE(back.problem.lower.B.isApprox(pf.problem.lower.B));
  EXPECT_TRUE(back.problem.upper_set.G.isApprox(pf.problem.upper_set.G));
  ASSERT_TRUE(back.sampling.has_value());
  EXPECT_DOUBLE_EQ(back.sampling->h, 0.05);
  ASSERT_EQ(back.candidates.size(), 2u);
  EXPECT_TRUE(back.candidates[1].x.isApprox(pf.candidates[1].x));
}

}  // namespace
}  // namespace mobilevel
