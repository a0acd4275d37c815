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

#include "interdistrict/spda.h"

#include <algorithm>

namespace interdistrict {
namespace {

// lists[s] is the order in which s proposes; an empty list sits out.
SpdaTrace DeferredAcceptance(const Problem& p, const RuleProfile& rules,
                             const std::vector<std::vector<int>>& lists) {
  const int n = p.num_students();
  const int num_d = p.num_districts();
  const size_t max_steps =
      static_cast<size_t>(p.num_students()) * p.num_schools() + 1;
  std::vector<size_t> next(n, 0);
  std::vector<char> pending(n, 1);
  std::vector<ContractSet> held(num_d);
  SpdaTrace trace;

  while (true) {
    SpdaStep step;
    step.proposals.assign(num_d, {});
    for (int s = 0; s < n; ++s) {
      if (!pending[s] || next[s] >= lists[s].size()) continue;
      Contract x = MakeContract(p, s, lists[s][next[s]++]);
      step.proposals[x.district].push_back(x);
      pending[s] = 0;
    }
    for (int d = 0; d < num_d; ++d) {
      step.proposals[d] = Normalize(std::move(step.proposals[d]));
      ContractSet offered = Union(held[d], step.proposals[d]);
      ContractSet chosen = rules[d].Choose(offered);
      for (const Contract& x : Difference(offered, chosen)) {
        step.rejected.push_back(x);
        pending[x.student] = 1;
      }
      held[d] = std::move(chosen);
      step.tentative = Union(step.tentative, held[d]);
    }
    step.rejected = Normalize(std::move(step.rejected));
    bool done = step.rejected.empty();
    trace.steps.push_back(std::move(step));
    if (done) break;
    if (trace.steps.size() > max_steps) {
      trace.outcome = trace.steps.back().tentative;
      throw RuleViolation(
          "deferred acceptance exceeded " + std::to_string(max_steps) +
              " steps; some admissions rule is not well behaved",
          std::move(trace));
    }
  }
  trace.outcome = trace.steps.back().tentative;
  return trace;
}

}  // namespace

SpdaTrace RunSpda(const Problem& p, const RuleProfile& rules) {
  std::vector<std::vector<int>> lists;
  for (int s = 0; s < p.num_students(); ++s) lists.push_back(p.preferences(s));
  return DeferredAcceptance(p, rules, lists);
}

Matching RunIntradistrictSpda(const Problem& p, const RuleProfile& rules) {
  Matching out;
  for (int d = 0; d < p.num_districts(); ++d) {
    std::vector<std::vector<int>> lists(p.num_students());
    for (int s = 0; s < p.num_students(); ++s) {
      if (p.student_district(s) != d) continue;
      for (int c : p.preferences(s)) {
        if (p.school_district(c) == d) lists[s].push_back(c);
      }
    }
    out = Union(out, DeferredAcceptance(p, rules, lists).outcome);
  }
  return out;
}

StabilityVerdict CheckStability(const Matching& x, const Problem& p,
                                const RuleProfile& rules) {
  StabilityVerdict verdict;
  for (int d = 0; d < p.num_districts(); ++d) {
    ContractSet own = RestrictToDistrict(x, d);
    if (rules[d].Choose(own) != own) {
      verdict.holds = false;
      verdict.unstable_district = d;
      return verdict;
    }
  }
  std::vector<int> school_of = AssignmentOf(x, p);
  for (int s = 0; s < p.num_students(); ++s) {
    for (int c : p.preferences(s)) {
      if (c == school_of[s]) break;
      Contract y = MakeContract(p, s, c);
      ContractSet with = x;
      with.push_back(y);
      if (Contains(rules[y.district].Choose(Normalize(std::move(with))), y)) {
        verdict.holds = false;
        verdict.blocking = y;
        return verdict;
      }
    }
  }
  return verdict;
}

Verdict CheckIndividualRationality(const Matching& x, const Problem& p) {
  std::vector<int> school_of = AssignmentOf(x, p);
  int worst = -1;
  int worst_drop = 0;
  for (int s = 0; s < p.num_students(); ++s) {
    int drop = p.rank(s, school_of[s]) - p.rank(s, p.initial_school(s));
    if (drop > worst_drop) {
      worst_drop = drop;
      worst = s;
    }
  }
  if (worst == -1) return {};
  return {false, p.student_id(worst)};
}

Verdict CheckBalancedExchange(const Matching& x, const Problem& p) {
  std::vector<int> count(p.num_districts(), 0);
  for (const Contract& c : x) ++count[c.district];
  for (int d = 0; d < p.num_districts(); ++d) {
    if (count[d] != p.district_size(d)) {
      return {false, p.district_id(d) + " " + std::to_string(count[d]) + " " +
                         std::to_string(p.district_size(d))};
    }
  }
  return {};
}

Rational AlphaDiversityGap(const Distribution& xi, const Problem& p,
                           int type) {
  std::optional<Rational> best;
  for (int d = 0; d < p.num_districts(); ++d) {
    if (p.district_size(d) == 0) continue;
    Rational share(xi.DistrictCount(p, d, type), p.district_size(d));
    for (int e = 0; e < p.num_districts(); ++e) {
      if (e == d || p.district_size(e) == 0) continue;
      Rational other(xi.DistrictCount(p, e, type), p.district_size(e));
      if (!best || share - other > *best) best = share - other;
    }
  }
  return best.value_or(Rational(0));
}

Rational AlphaDiversityGap(const Distribution& xi, const Problem& p) {
  std::optional<Rational> best;
  for (int t = 0; t < p.num_types(); ++t) {
    Rational gap = AlphaDiversityGap(xi, p, t);
    if (!best || gap > *best) best = gap;
  }
  return best.value_or(Rational(0));
}

Rational AlphaDiversityGap(const Matching& x, const Problem& p, int type) {
  return AlphaDiversityGap(DistributionOf(x, p), p, type);
}

Rational AlphaDiversityGap(const Matching& x, const Problem& p) {
  return AlphaDiversityGap(DistributionOf(x, p), p);
}

}  // namespace interdistrict
