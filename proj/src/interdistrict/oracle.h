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

// Brute-force ground truth over small markets: stable and constrained
// efficient matchings, manipulation audits, and the search for admissions
// rules under ceiling constraints.

#ifndef INTERDISTRICT_ORACLE_H_
#define INTERDISTRICT_ORACLE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "interdistrict/model.h"
#include "interdistrict/policy.h"
#include "interdistrict/rules.h"

namespace interdistrict {

inline constexpr int64_t kDefaultEnumerationBudget = 10'000'000;

std::vector<Matching> EnumerateStableMatchings(
    const Problem& p, const RuleProfile& rules,
    int64_t budget = kDefaultEnumerationBudget);

// Feasible, individually rational, in the goal, and not Pareto dominated by
// another feasible goal-satisfying matching. Lexicographic order.
std::vector<Matching> ConstrainedEfficientIrMatchings(
    const Problem& p, const PolicyGoal& goal,
    int64_t budget = kDefaultEnumerationBudget);

enum class MechanismId { kSpda, kSpdaIntra, kTtc, kEfficientSelector };

std::string_view MechanismName(MechanismId id);
std::optional<MechanismId> ParseMechanism(std::string_view name);

struct MechanismContext {
  const RuleProfile* rules = nullptr;  // spda, spda-intra
  const PolicyGoal* goal = nullptr;    // ttc, efficient-selector
  std::vector<int> master;             // ttc
};

// Runs a mechanism on a (possibly misreported) market. The efficient
// selector returns the lexicographically first constrained efficient IR
// matching.
Matching RunMechanism(MechanismId id, const Problem& p,
                      const MechanismContext& context);

struct AuditConfig {
  // Reports tried, each student's truthful one included.
  int64_t budget = 1'000'000;
  // Students to audit; empty means everyone.
  std::vector<int> students;
  bool stop_at_first = false;
};

struct AuditFinding {
  int student = 0;
  std::vector<int> true_report;
  std::vector<int> misreport;
  Matching honest;
  Matching deviant;
};

struct AuditReport {
  std::string mechanism;
  std::string instance;
  std::vector<AuditFinding> findings;
  bool exhaustive = false;
  bool budget_exceeded = false;
  int64_t runs = 0;
};

AuditReport AuditStrategyProofness(MechanismId id, const Problem& p,
                                   const MechanismContext& context,
                                   const AuditConfig& config);

struct Deviation {
  int student = 0;
  std::vector<int> misreport;
  // The matching the deviation is aimed at, and what the deviator gets.
  Matching against;
  Matching result;
};

struct ImpossibilityCertificate {
  std::vector<std::vector<int>> profile;
  // The two constrained efficient matchings, in lexicographic order.
  Matching x;
  Matching x_prime;
  Deviation against_x;
  Deviation against_x_prime;
};

// Needs exactly two constrained efficient IR matchings; each is undone by a
// student who ranks her school in the other one first and her initial school
// second, leaving that other matching as the only efficient one. Throws
// kNotApplicable otherwise.
ImpossibilityCertificate ReplayExample3Impossibility(const Problem& p,
                                                     const PolicyGoal& goal);

struct NonexistenceInstance {
  int district = 0;
  // type -> q_d^t
  std::map<int, int> district_ceilings;
};

struct SearchOptions {
  // Within-type and type-swap symmetry on the set where every student
  // applies to the district's first school.
  bool symmetry = true;
  int64_t node_budget = 50'000'000;
};

struct SearchResult {
  enum class Status { kUnsatisfiable, kSatisfiable };
  Status status = Status::kUnsatisfiable;
  int64_t nodes = 0;
  int64_t domain_sets = 0;
  // Root-level case split and the first wipe-out in each case.
  std::vector<std::string> refutation;
  // Explicit table over the feasible sets of the district's universe.
  std::optional<RuleSpec> witness;
};

// Searches for a choice function of the district with the given type
// ceilings that is d-weakly acceptant, weakly substitutable and IRC.
// Throws kSearchBudgetExceeded past `node_budget` nodes.
SearchResult SearchRuleNonexistence(const Problem& p,
                                    const NonexistenceInstance& instance,
                                    const SearchOptions& options = {});

}  // namespace interdistrict

#endif  // INTERDISTRICT_ORACLE_H_
