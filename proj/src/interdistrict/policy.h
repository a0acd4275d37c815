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

// Distributional policy goals, exchange-property checkers, and the implied
// district-level type bounds.

#ifndef INTERDISTRICT_POLICY_H_
#define INTERDISTRICT_POLICY_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "interdistrict/flow.h"
#include "interdistrict/model.h"

namespace interdistrict {

using DistributionSet = std::unordered_set<Distribution, DistributionHash>;

// (school, type) -> bound. Missing entries mean "no bound" (0 for floors,
// the school capacity for ceilings).
using SchoolTypeBounds = std::map<std::pair<int, int>, int>;
// (district, type) -> q_d^t.
using DistrictTypeBounds = std::map<std::pair<int, int>, int>;

// Xi^0: everyone matched within school capacities.
bool InXi0(const Distribution& xi, const Problem& p);

// Lexicographic order. Throws kUniverseTooLarge if the capacity box exceeds
// `bound`.
std::vector<Distribution> EnumerateXi0(const Problem& p,
                                       int64_t bound = 10'000'000);

class PolicyFunction {
 public:
  enum class Kind { kManhattanIdeal, kIndicator, kTable };

  // f = -sum |xi - ideal|. Throws kValidation unless ideal is in Xi^0.
  static PolicyFunction ManhattanIdeal(const Problem& p, Distribution ideal);
  // 1 on set ∩ Xi^0, 0 elsewhere.
  static PolicyFunction Indicator(const Problem& p,
                                  const std::vector<Distribution>& set);
  static PolicyFunction Table(std::map<Distribution, Rational> values,
                              Rational fallback);

  Kind kind() const { return kind_; }
  Rational operator()(const Distribution& xi) const;

  const Distribution& ideal() const { return ideal_; }
  const std::vector<Distribution>& indicator_set() const { return set_list_; }
  const std::map<Distribution, Rational>& table() const { return table_; }
  const Rational& fallback() const { return fallback_; }

 private:
  Kind kind_ = Kind::kTable;
  Distribution ideal_;
  std::vector<int> capacities_;
  int total_ = 0;
  std::vector<Distribution> set_list_;
  std::shared_ptr<DistributionSet> set_;
  std::map<Distribution, Rational> table_;
  Rational fallback_{0};
};

PolicyFunction IndicatorOf(const std::vector<Distribution>& set,
                           const Problem& p);

struct PolicyGoal {
  enum class Form {
    kExplicitSet,
    kBalancedExchange,
    kSchoolDiversity,
    kCombination,
    kFLambda,
    // Only meant for the impossibility demonstrations.
    kDistrictCeilings,
  };

  Form form = Form::kBalancedExchange;
  std::vector<Distribution> explicit_set;
  SchoolTypeBounds floors;
  SchoolTypeBounds ceilings;
  DistrictTypeBounds district_ceilings;
  std::optional<PolicyFunction> function;
  Rational lambda{0};
  bool intersect_xi0 = false;

  // True for forms known to break the efficiency and stability guarantees.
  bool warning() const { return form == Form::kDistrictCeilings; }
};

std::string_view PolicyFormName(PolicyGoal::Form form);
std::optional<PolicyGoal::Form> ParsePolicyForm(std::string_view name);

bool GoalContains(const PolicyGoal& goal, const Distribution& xi,
                  const Problem& p);

// goal ∩ Xi^0, in lexicographic order.
std::vector<Distribution> GoalWithinXi0(const PolicyGoal& goal,
                                        const Problem& p);

struct MConvexWitness {
  Distribution xi;
  Distribution xi_tilde;
  int school = 0;
  int type = 0;
};

struct MConvexVerdict {
  bool holds = true;
  std::optional<MConvexWitness> witness;
};

// Exchange test for one pair at one coordinate with xi > xi_tilde there:
// true if some (c', t') with xi < xi_tilde makes both exchanged points
// members of `set`.
bool ExchangeSucceeds(const DistributionSet& set, const Distribution& xi,
                      const Distribution& xi_tilde, int c, int t);

// Pairs are scanned in the order of `set`, coordinates in (school, type)
// order; the first failure is the witness.
MConvexVerdict IsMConvex(const std::vector<Distribution>& set);

struct PseudoConcavityVerdict {
  bool holds = true;
  std::optional<std::pair<Distribution, Distribution>> witness;
};

PseudoConcavityVerdict IsPseudoMConcave(const PolicyFunction& f,
                                        const Problem& p,
                                        int64_t bound = 10'000'000);

// {xi in Xi^0 : f(xi) >= lambda}.
std::vector<Distribution> UpperContour(const PolicyFunction& f,
                                       const Rational& lambda,
                                       const Problem& p,
                                       int64_t bound = 10'000'000);

struct ImpliedBound {
  int floor = 0;    // p-hat
  int ceiling = 0;  // q-hat
};

// The legitimate-matching network: source -> district (exactly k_d) ->
// school (<= q_c) -> (school, type) (<= q_c^t) -> type (exactly k^t) -> sink.
struct LegitimacyNetwork {
  FlowNetwork network;
  // arc index of (school, type) -> type, [c * num_types + t]
  std::vector<int> school_type_arcs;
};

LegitimacyNetwork BuildLegitimacyNetwork(const Problem& p,
                                         const SchoolTypeBounds& ceilings);

// (district, type) -> bounds. Throws kInfeasibleConstraints when no
// legitimate distribution exists.
std::map<std::pair<int, int>, ImpliedBound> ImpliedBounds(
    const Problem& p, const SchoolTypeBounds& ceilings);

struct DiversityCondition {
  struct Entry {
    int type;
    int district;
    int other;
    Rational delta;
  };
  std::vector<Entry> deltas;  // ordered by (type, district, other)
  Rational max_delta{0};
  bool satisfied = false;
};

DiversityCondition CheckDiversityCondition(const Problem& p,
                                           const SchoolTypeBounds& ceilings,
                                           const Rational& alpha);

// Xi^0 filtered by district totals, type totals, and ceilings.
std::vector<Distribution> LegitimateDistributions(
    const Problem& p, const SchoolTypeBounds& ceilings,
    int64_t bound = 10'000'000);

}  // namespace interdistrict

#endif  // INTERDISTRICT_POLICY_H_
