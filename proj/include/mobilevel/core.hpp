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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace mobilevel {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

enum class ErrorKind {
  DimensionMismatch,
  EmptyInput,
  Infeasible,
  Unbounded,
  IterationLimit,
  GuardExceeded,
  Unsupported,
  VacuousSample,
  InfeasibleCandidate,
  Parse,
  UnknownTolerance,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::EmptyInput: return "empty input";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Unbounded: return "unbounded";
    case ErrorKind::IterationLimit: return "iteration limit";
    case ErrorKind::GuardExceeded: return "size guard exceeded";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::VacuousSample: return "vacuous sample";
    case ErrorKind::InfeasibleCandidate: return "infeasible candidate";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::UnknownTolerance: return "unknown tolerance";
  }
  return "unknown";
}

/// Structured error carried by every failing operation in the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::DimensionMismatch, what);
}

inline Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Index>(v.size()));
}

inline std::vector<double> to_std(const Vec& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace mobilevel
