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

#include "interdistrict/common.h"

#include <charconv>

namespace interdistrict {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kValidation: return "ValidationError";
    case ErrorCode::kUnknownContract: return "UnknownContract";
    case ErrorCode::kNotInDomain: return "NotInDomain";
    case ErrorCode::kDuplicateStudent: return "DuplicateStudent";
    case ErrorCode::kUniverseTooLarge: return "UniverseTooLarge";
    case ErrorCode::kNoCompletionConstruction:
      return "NoCompletionConstruction";
    case ErrorCode::kRuleViolation: return "RuleViolation";
    case ErrorCode::kInfeasibleConstraints: return "InfeasibleConstraints";
    case ErrorCode::kPolicyViolatedAtStart: return "PolicyViolatedAtStart";
    case ErrorCode::kStuck: return "Stuck";
    case ErrorCode::kTypeMismatch: return "TypeMismatch";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kNotApplicable: return "NotApplicable";
    case ErrorCode::kSearchBudgetExceeded: return "SearchBudgetExceeded";
    case ErrorCode::kUsage: return "UsageError";
  }
  return "Error";
}

namespace {

int64_t ParseInt(std::string_view text, std::string_view whole) {
  int64_t value = 0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kValidation,
                "malformed rational \"" + std::string(whole) + "\"");
  }
  return value;
}

}  // namespace

Rational ParseRational(std::string_view text) {
  size_t slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(ParseInt(text, text));
  int64_t num = ParseInt(text.substr(0, slash), text);
  int64_t den = ParseInt(text.substr(slash + 1), text);
  if (den == 0) {
    throw Error(ErrorCode::kValidation,
                "zero denominator in \"" + std::string(text) + "\"");
  }
  return Rational(num, den);
}

std::string FormatRational(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace interdistrict
