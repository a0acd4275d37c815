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

// Student-proposing deferred acceptance over district choice functions,
// stability, and the matching-level policy checks.

#ifndef INTERDISTRICT_SPDA_H_
#define INTERDISTRICT_SPDA_H_

#include <optional>
#include <string>
#include <vector>

#include "interdistrict/model.h"
#include "interdistrict/rules.h"

namespace interdistrict {

struct SpdaStep {
  // New proposals this step, per district.
  std::vector<ContractSet> proposals;
  // Union over districts of Ch_d(X_d^n).
  ContractSet tentative;
  ContractSet rejected;
};

struct SpdaTrace {
  std::vector<SpdaStep> steps;
  Matching outcome;
};

// Raised when a step budget of |S|*|C|+1 is exceeded; carries the trace.
class RuleViolation : public Error {
 public:
  RuleViolation(const std::string& message, SpdaTrace trace)
      : Error(ErrorCode::kRuleViolation, message), trace_(std::move(trace)) {}
  const SpdaTrace& trace() const { return trace_; }

 private:
  SpdaTrace trace_;
};

SpdaTrace RunSpda(const Problem& p, const RuleProfile& rules);

// Each district runs its own SPDA among its own students, who only rank the
// district's schools; the union of the outcomes.
Matching RunIntradistrictSpda(const Problem& p, const RuleProfile& rules);

struct StabilityVerdict {
  bool holds = true;
  // District d with Ch_d(X_d) != X_d.
  std::optional<int> unstable_district;
  std::optional<Contract> blocking;
};

StabilityVerdict CheckStability(const Matching& x, const Problem& p,
                                const RuleProfile& rules);

struct Verdict {
  bool holds = true;
  std::string witness;
};

// Witness: the student whose rank drops the most against her initial school.
Verdict CheckIndividualRationality(const Matching& x, const Problem& p);
// Witness: "district |X_d| k_d" for the first district off balance.
Verdict CheckBalancedExchange(const Matching& x, const Problem& p);

// max over (t, d, d') of xi_d^t/k_d - xi_{d'}^t/k_{d'}.
Rational AlphaDiversityGap(const Matching& x, const Problem& p);
// Same maximum restricted to one type.
Rational AlphaDiversityGap(const Matching& x, const Problem& p, int type);
Rational AlphaDiversityGap(const Distribution& xi, const Problem& p);
Rational AlphaDiversityGap(const Distribution& xi, const Problem& p, int type);

}  // namespace interdistrict

#endif  // INTERDISTRICT_SPDA_H_
