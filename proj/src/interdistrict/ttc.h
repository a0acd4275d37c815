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

// Top trading cycles over the market of (school, type) pairs, constrained by
// a distributional policy goal.

#ifndef INTERDISTRICT_TTC_H_
#define INTERDISTRICT_TTC_H_

#include <string>
#include <vector>

#include "interdistrict/model.h"
#include "interdistrict/policy.h"

namespace interdistrict {

// Pair (c, t) has index c * num_types + t.
struct HypotheticalMarket {
  int num_schools = 0;
  int num_types = 0;
  // Per student, every pair from most to least preferred.
  std::vector<std::vector<int>> student_prefs;
  // Per pair, every student from highest to lowest priority.
  std::vector<std::vector<int>> pair_priorities;
  std::vector<int> initial_pair;

  int pair(int c, int t) const { return c * num_types + t; }
  int school_of(int pair) const { return pair / num_types; }
  int type_of(int pair) const { return pair % num_types; }
};

// `master` empty means instance student order.
HypotheticalMarket BuildHypothetical(const Problem& p,
                                     const std::vector<int>& master);

// xi(X) + chi_target - chi_{initial pair of s} within goal ∩ Xi^0. Asking
// about a pair of another type throws kTypeMismatch unless `audit`.
bool IsPermissible(int s, int target_school, int target_type, const Matching& x,
                   const PolicyGoal& goal, const Problem& p, bool audit = false);

struct TtcCycle {
  // students[i] points to pairs[i]; pairs[i] points to students[i + 1].
  // Rotated so that the smallest student comes first.
  std::vector<int> students;
  std::vector<int> pairs;
};

struct TtcStep {
  std::vector<int> active_pairs;
  // (pair, student) and (student, pair)
  std::vector<std::pair<int, int>> pair_points;
  std::vector<std::pair<int, int>> student_points;
  std::vector<TtcCycle> cycles;
  std::vector<int> removed_pairs;
};

struct TtcTrace {
  std::vector<TtcStep> steps;
  Matching outcome;
};

class TtcStuck : public Error {
 public:
  TtcStuck(const std::string& message, TtcTrace trace)
      : Error(ErrorCode::kStuck, message), trace_(std::move(trace)) {}
  const TtcTrace& trace() const { return trace_; }

 private:
  TtcTrace trace_;
};

// Throws kPolicyViolatedAtStart when the initial matching is outside the
// goal, and TtcStuck when no student can move any more.
TtcTrace RunTtc(const Problem& p, const PolicyGoal& goal,
                const std::vector<int>& master);

std::string PairName(const Problem& p, int num_types, int pair);

}  // namespace interdistrict

#endif  // INTERDISTRICT_TTC_H_
