// Copyright 2026 The dynfab Authors.
//
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

#ifndef DYNFAB_CORE_HPP_
#define DYNFAB_CORE_HPP_

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dynfab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Caller broke a precondition (dimensions, index ranges, parameter signs).
class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what) : Error(what) {}
};

// Input outside the numeric domain of a function (NaN, x <= 0 for barriers).
class NumericDomainError : public Error {
 public:
  explicit NumericDomainError(const std::string& what) : Error(what) {}
};

// Evaluation at a point where a derivative is undefined.
class SingularityError : public Error {
 public:
  explicit SingularityError(const std::string& what) : Error(what) {}
};

// Linear solve rejected because the metric is singular or ill-conditioned.
class SolveError : public Error {
 public:
  SolveError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

// Structured configuration error; `fields` names every offending path.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> fields)
      : Error(Join(fields)), fields_(std::move(fields)) {}
  const std::vector<std::string>& fields() const { return fields_; }

 private:
  static std::string Join(const std::vector<std::string>& fields) {
    std::string out = "invalid configuration:";
    for (const auto& f : fields) out += "\n  " + f;
    return out;
  }
  std::vector<std::string> fields_;
};

namespace detail {

inline void RequireDim(Eigen::Index actual, Eigen::Index expected,
                       const char* what) {
  if (actual != expected) {
    throw ContractError(std::string(what) + ": dimension " +
                        std::to_string(actual) + ", expected " +
                        std::to_string(expected));
  }
}

template <typename Derived>
void RequireFinite(const Eigen::MatrixBase<Derived>& v, const char* what) {
  if (!v.allFinite()) {
    throw NumericDomainError(std::string(what) + ": non-finite value");
  }
}

}  // namespace detail
}  // namespace dynfab

#endif  // DYNFAB_CORE_HPP_
