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

#include <map>
#include <string>

#include "mobilevel/core.hpp"

namespace mobilevel {

/// Named numerical tolerances. Every field is addressable by name so the
/// command line and tolerance files can override any of them.
struct Tolerances {
  double feas = 1e-9;   // constraint satisfaction of LP minimizers
  double opt = 1e-9;    // LP optimality and dichotomic-search improvement
  double face = 1e-7;   // optimal-face membership
  double vert = 1e-8;   // vertex merging
  double proj = 1e-9;   // projection optimality gap
  double nnls = 1e-9;   // nonnegative least squares stationarity
  double cert = 1e-8;   // certificate verification
  double dom = 0.0;     // dominance ties
  double act = 1e-7;    // active-set detection
  double pos = 1e-6;    // positivity threshold for estimated moduli
  double lex = 1e-6;    // inward perturbation of lexicographic corner weights
  double zero = 1e-10;  // distances treated as zero in ratio estimates
  double max_iter = 0;  // simplex pivot cap; 0 selects a size-based default

  using Member = double Tolerances::*;

  static const std::map<std::string, Member>& table() {
    static const std::map<std::string, Member> members = {
        {"feas", &Tolerances::feas}, {"opt", &Tolerances::opt},
        {"face", &Tolerances::face}, {"vert", &Tolerances::vert},
        {"proj", &Tolerances::proj}, {"nnls", &Tolerances::nnls},
        {"cert", &Tolerances::cert}, {"dom", &Tolerances::dom},
        {"act", &Tolerances::act},   {"pos", &Tolerances::pos},
        {"lex", &Tolerances::lex},   {"zero", &Tolerances::zero},
        {"max_iter", &Tolerances::max_iter}};
    return members;
  }

  static Member member(const std::string& name) {
    auto it = table().find(name);
    if (it == table().end()) throw Error(ErrorKind::UnknownTolerance, name);
    return it->second;
  }

  void set(const std::string& name, double value) {
    Member m = member(name);
    if (!(value >= 0.0)) {
      throw Error(ErrorKind::Parse, "tolerance " + name + " must be >= 0");
    }
    this->*m = value;
  }

  double get(const std::string& name) const { return this->*member(name); }
};

}  // namespace mobilevel
