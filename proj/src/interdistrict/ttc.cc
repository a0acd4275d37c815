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

#include "interdistrict/ttc.h"

#include <algorithm>
#include <numeric>

namespace interdistrict {

HypotheticalMarket BuildHypothetical(const Problem& p,
                                     const std::vector<int>& master) {
  HypotheticalMarket market;
  market.num_schools = p.num_schools();
  market.num_types = p.num_types();
  std::vector<int> order = master;
  if (order.empty()) {
    order.resize(p.num_students());
    std::iota(order.begin(), order.end(), 0);
  }
  for (int s = 0; s < p.num_students(); ++s) {
    const int own = p.student_type(s);
    const int c0 = p.initial_school(s);
    market.initial_pair.push_back(market.pair(c0, own));
    std::vector<int> prefs;
    // Own-type pairs down to the initial school, in P_s order.
    for (int c : p.preferences(s)) {
      prefs.push_back(market.pair(c, own));
      if (c == c0) break;
    }
    // Everything else: school in P_s order, then type order.
    for (int c : p.preferences(s)) {
      for (int t = 0; t < p.num_types(); ++t) {
        int q = market.pair(c, t);
        if (std::find(prefs.begin(), prefs.end(), q) == prefs.end()) {
          prefs.push_back(q);
        }
      }
    }
    market.student_prefs.push_back(std::move(prefs));
  }
  const int num_pairs = p.num_schools() * p.num_types();
  for (int q = 0; q < num_pairs; ++q) {
    std::vector<int> priority;
    for (int s : order) {
      if (market.initial_pair[s] == q) priority.push_back(s);
    }
    for (int s : order) {
      if (market.initial_pair[s] != q) priority.push_back(s);
    }
    market.pair_priorities.push_back(std::move(priority));
  }
  return market;
}

namespace {

bool ExchangeAllowed(const Distribution& xi, int from_pair, int to_pair,
                     int num_types, const PolicyGoal& goal, const Problem& p) {
  Distribution moved =
      xi.Exchanged(from_pair / num_types, from_pair % num_types,
                   to_pair / num_types, to_pair % num_types);
  return GoalContains(goal, moved, p) && InXi0(moved, p);
}

}  // namespace

bool IsPermissible(int s, int target_school, int target_type, const Matching& x,
                   const PolicyGoal& goal, const Problem& p, bool audit) {
  if (!audit && target_type != p.student_type(s)) {
    throw Error(ErrorCode::kTypeMismatch,
                "student " + p.student_id(s) + " is of type " +
                    p.type_id(p.student_type(s)) + ", asked about type " +
                    p.type_id(target_type));
  }
  const int num_t = p.num_types();
  return ExchangeAllowed(DistributionOf(x, p),
                         p.initial_school(s) * num_t + p.student_type(s),
                         target_school * num_t + target_type, num_t, goal, p);
}

std::string PairName(const Problem& p, int num_types, int pair) {
  return "(" + p.school_id(pair / num_types) + "," +
         p.type_id(pair % num_types) + ")";
}

TtcTrace RunTtc(const Problem& p, const PolicyGoal& goal,
                const std::vector<int>& master) {
  const HypotheticalMarket market = BuildHypothetical(p, master);
  const int n = p.num_students();
  const int num_t = p.num_types();
  const int num_pairs = p.num_schools() * num_t;

  Matching initial = InitialMatching(p);
  Distribution start = DistributionOf(initial, p);
  if (!GoalContains(goal, start, p) || !InXi0(start, p)) {
    throw Error(ErrorCode::kPolicyViolatedAtStart,
                "the initial matching does not satisfy the policy goal");
  }

  std::vector<int> assigned(n, -1);  // pair
  std::vector<char> removed(num_pairs, 0);
  TtcTrace trace;
  auto current_matching = [&] {
    std::vector<int> school_of(n);
    for (int s = 0; s < n; ++s) {
      school_of[s] = assigned[s] >= 0 ? market.school_of(assigned[s])
                                      : p.initial_school(s);
    }
    return MatchingFromAssignment(p, school_of);
  };
  auto remaining = [&] {
    return std::count(assigned.begin(), assigned.end(), -1);
  };

  while (remaining() > 0) {
    TtcStep step;
    Matching x = current_matching();
    Distribution xi = DistributionOf(x, p);
    if (!GoalContains(goal, xi, p) || !InXi0(xi, p)) {
      trace.outcome = x;
      throw TtcStuck("the tentative matching left the policy goal",
                     std::move(trace));
    }
    for (int q = 0; q < num_pairs; ++q) {
      if (!removed[q]) step.active_pairs.push_back(q);
    }

    std::vector<int> pair_target(num_pairs, -1);
    for (int q : step.active_pairs) {
      for (int s : market.pair_priorities[q]) {
        if (assigned[s] >= 0) continue;
        if (ExchangeAllowed(xi, market.initial_pair[s], q, num_t, goal, p)) {
          pair_target[q] = s;
          break;
        }
      }
      if (pair_target[q] == -1) {
        removed[q] = 1;
        step.removed_pairs.push_back(q);
      } else {
        step.pair_points.emplace_back(q, pair_target[q]);
      }
    }

    std::vector<int> student_target(n, -1);
    for (int s = 0; s < n; ++s) {
      if (assigned[s] >= 0) continue;
      for (int q : market.student_prefs[s]) {
        if (!removed[q]) {
          student_target[s] = q;
          break;
        }
      }
      if (student_target[s] == -1) {
        trace.steps.push_back(std::move(step));
        trace.outcome = x;
        throw TtcStuck("student " + p.student_id(s) +
                           " has no remaining pair to point to",
                       std::move(trace));
      }
      step.student_points.emplace_back(s, student_target[s]);
    }

    // Successor walk over students: s -> pair -> student.
    std::vector<int> color(n, 0);  // 0 new, 1 on current path, 2 done
    for (int s = 0; s < n; ++s) {
      if (assigned[s] >= 0 || color[s] != 0) continue;
      std::vector<int> path;
      int v = s;
      while (color[v] == 0) {
        color[v] = 1;
        path.push_back(v);
        v = pair_target[student_target[v]];
      }
      if (color[v] == 1) {
        TtcCycle cycle;
        auto begin = std::find(path.begin(), path.end(), v);
        std::vector<int> members(begin, path.end());
        std::rotate(members.begin(),
                    std::min_element(members.begin(), members.end()),
                    members.end());
        for (int m : members) {
          cycle.students.push_back(m);
          cycle.pairs.push_back(student_target[m]);
        }
        step.cycles.push_back(std::move(cycle));
      }
      for (int u : path) color[u] = 2;
    }
    std::sort(step.cycles.begin(), step.cycles.end(),
              [](const TtcCycle& a, const TtcCycle& b) {
                return a.students.front() < b.students.front();
              });
    for (const TtcCycle& cycle : step.cycles) {
      for (size_t i = 0; i < cycle.students.size(); ++i) {
        assigned[cycle.students[i]] = cycle.pairs[i];
      }
    }
    bool progress = !step.cycles.empty() || !step.removed_pairs.empty();
    trace.steps.push_back(std::move(step));
    if (!progress) {
      trace.outcome = current_matching();
      throw TtcStuck("no cycle and no removable pair", std::move(trace));
    }
  }
  trace.outcome = current_matching();
  return trace;
}

}  // namespace interdistrict
