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

// District admissions rules (choice functions over contracts) and exhaustive
// checkers for their regularity properties.

#ifndef INTERDISTRICT_RULES_H_
#define INTERDISTRICT_RULES_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "interdistrict/model.h"

namespace interdistrict {

enum class RuleKind {
  // Schools pick responsively in school_order; a student chosen by an earlier
  // school loses her other contracts.
  kSequentialResponsive,
  // As above, but each school ranks its initially matched students first.
  kInitialRespecting,
  // Sequential, and the district stops once it holds district_cap contracts.
  kRationedSequential,
  // Reserved seats per (school, type) first, then open seats subject to
  // per-type ceilings and the district cap.
  kReservesAndCeilings,
  // Arbitrary choice function given as a lookup table.
  kExplicitTable,
};

std::string_view RuleKindName(RuleKind kind);
std::optional<RuleKind> ParseRuleKind(std::string_view name);

// Choice values over subsets of a fixed contract universe, keyed by bitmask
// (bit i is universe[i]).
struct ChoiceTable {
  enum class Domain { kAllSubsets, kFeasibleSubsets };
  ContractSet universe;
  Domain domain = Domain::kAllSubsets;
  std::unordered_map<uint32_t, uint32_t> chosen;
};

struct RuleSpec {
  int district = 0;
  RuleKind kind = RuleKind::kSequentialResponsive;
  std::vector<int> school_order;
  // school -> students, highest priority first. Schools without an entry use
  // `master`, or the instance student order when `master` is empty.
  std::map<int, std::vector<int>> priorities;
  std::vector<int> master;
  // (school, type) -> r_c^t and q_c^t.
  std::map<std::pair<int, int>, int> reserves;
  std::map<std::pair<int, int>, int> ceilings;
  std::vector<int> type_order;
  // Defaults to k_d for the rationed kinds.
  std::optional<int> district_cap;
  // type -> q_d^t. Only read by the checkers.
  std::map<int, int> district_ceilings;
  // Students from the district outrank everyone else at every school.
  bool favor_own_students = false;
  // Evaluate the completion construction instead of the rule itself.
  bool completion = false;
  std::shared_ptr<const ChoiceTable> table;
};

// Throws kNoCompletionConstruction for table rules.
RuleSpec CompletionOf(const RuleSpec& spec);
RuleSpec FavoringOwnStudents(RuleSpec spec);

// A RuleSpec checked against a problem and compiled for fast evaluation.
// Only reads the non-preference parts of the problem, so it stays valid for
// misreported copies of the same market.
class AdmissionsRule {
 public:
  // Throws Error(kValidation) when the spec does not fit the problem.
  AdmissionsRule(const Problem& p, RuleSpec spec);

  const RuleSpec& spec() const { return spec_; }
  int district() const { return spec_.district; }
  // k_d of the district.
  int district_size() const { return district_size_; }
  int capacity(int c) const { return capacity_[c]; }
  // q_c^t, defaulting to the school capacity.
  int SchoolCeiling(int c, int t) const;
  std::optional<int> DistrictCeiling(int t) const;

  // Ch_d(X). Contracts of other districts are ignored.
  ContractSet Choose(const ContractSet& x) const;

 private:
  ContractSet ChooseSequential(const ContractSet& own) const;
  ContractSet ChooseFromTable(const ContractSet& own) const;

  RuleSpec spec_;
  int num_students_ = 0;
  int district_size_ = 0;
  std::vector<int> capacity_;
  std::vector<int> school_district_;
  std::vector<int> student_type_;
  // priority_rank_[c][s]; empty for schools outside the district.
  std::vector<std::vector<int>> priority_rank_;
  std::vector<int> reserve_;  // [c * num_types + t]
  std::vector<int> ceiling_;  // [c * num_types + t]
  std::vector<int> type_order_;
  int num_types_ = 0;
};

// One rule per district, indexed by district.
using RuleProfile = std::vector<AdmissionsRule>;

// Throws Error(kValidation) unless there is exactly one spec per district.
RuleProfile MakeProfile(const Problem& p, const std::vector<RuleSpec>& specs);

enum class RuleProperty {
  kFeasible,
  kAcceptant,
  kWeaklyAcceptant,
  kDWeaklyAcceptant,
  kDistrictCeilings,
  kRationed,
  kRespectsInitialMatching,
  kFavorsOwnStudents,
  kSubstitutable,
  kWeaklySubstitutable,
  kLad,
  kIrc,
  kPathIndependent,
  kIsCompletionOf,
};

std::string_view RulePropertyName(RuleProperty prop);
std::optional<RuleProperty> ParseRuleProperty(std::string_view name);
// True when the property quantifies over sets feasible for students only.
bool QuantifiesOverFeasibleSets(RuleProperty prop);

struct PropertyWitness {
  ContractSet set;
  ContractSet chosen;
  // The contract the definition is about (rejected, dropped, ...).
  std::optional<Contract> contract;
  // For the single-removal properties: the contract taken out of `set`.
  std::optional<Contract> removed;
  std::string detail;
};

struct PropertyVerdict {
  bool holds = true;
  std::optional<PropertyWitness> witness;
  int64_t sets_checked = 0;
};

struct CheckOptions {
  int max_contracts = 16;
  int64_t max_feasible_sets = 1'000'000;
  int threads = 1;
  // The rule that the checked rule should complete (kIsCompletionOf).
  const AdmissionsRule* reference = nullptr;
};

// Exhaustive check over the property's quantifier domain. The witness is the
// first violation in shortlex order of the input set (size, then contracts
// in instance order), independent of `threads`.
PropertyVerdict CheckProperty(const AdmissionsRule& rule, RuleProperty prop,
                              const Problem& p, const CheckOptions& opts = {});

// Profile-level: whenever a student is unmatched in a feasible matching,
// some district would take her if she applied.
PropertyVerdict CheckAccommodatesUnmatched(const RuleProfile& profile,
                                           const Problem& p,
                                           int64_t budget = 10'000'000);

std::string ToString(const Problem& p, const PropertyVerdict& verdict);

}  // namespace interdistrict

#endif  // INTERDISTRICT_RULES_H_
