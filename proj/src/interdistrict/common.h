// Copyright 2026 The Authors.
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

#ifndef INTERDISTRICT_COMMON_H_
#define INTERDISTRICT_COMMON_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace interdistrict {

// Policy ratios and thresholds are exact; no floats anywhere in the engine.
using Rational = boost::rational<int64_t>;

enum class ErrorCode {
  kValidation,
  kUnknownContract,
  kNotInDomain,
  kDuplicateStudent,
  kUniverseTooLarge,
  kNoCompletionConstruction,
  kRuleViolation,
  kInfeasibleConstraints,
  kPolicyViolatedAtStart,
  kStuck,
  kTypeMismatch,
  kBudgetExceeded,
  kNotApplicable,
  kSearchBudgetExceeded,
  kUsage,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// "p/q", "p", or "-p/q". Throws Error(kValidation) on anything else.
Rational ParseRational(std::string_view text);
std::string FormatRational(const Rational& r);

}  // namespace interdistrict

#endif  // INTERDISTRICT_COMMON_H_
