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

#include <gtest/gtest.h>

#include <algorithm>

#include "test_fixtures.h"

namespace interdistrict {
namespace {

using testing::LoadFixture;
using testing::SchoolIndex;
using testing::Set;
using testing::StudentIndex;
using testing::TypeIndex;

class Example5Test : public ::testing::Test {
 protected:
  Instance inst = LoadFixture("example5.json");
  const Problem& p = inst.problem;
  const PolicyGoal& goal = *inst.policy;
  HypotheticalMarket market = BuildHypothetical(p, inst.master);

  int Pair(const std::string& c, const std::string& t) const {
    return market.pair(SchoolIndex(p, c), TypeIndex(p, t));
  }
  int S(const std::string& id) const { return StudentIndex(p, id); }
};

TEST_F(Example5Test, LiftedPreferenceOfS1) {
  const std::vector<int>& prefs = market.student_prefs[S("s1")];
  ASSERT_GE(prefs.size(), 3u);
  EXPECT_EQ(prefs[0], Pair("c2", "t1"));
  EXPECT_EQ(prefs[1], Pair("c3", "t1"));
  EXPECT_EQ(prefs[2], Pair("c1", "t1"));
  EXPECT_EQ(prefs.size(), 8u);
}

TEST_F(Example5Test, InitialHoldersLeadPriority) {
  const std::vector<int>& priority = market.pair_priorities[Pair("c1", "t1")];
  EXPECT_EQ(priority[0], S("s1"));
  EXPECT_EQ(priority[1], S("s2"));
  EXPECT_EQ(market.initial_pair[S("s7")], Pair("c4", "t2"));
}

TEST_F(Example5Test, Permissibility) {
  Matching x = InitialMatching(p);
  // A t2 student may replace s1 at c1 without breaking the c1 ceiling.
  EXPECT_TRUE(IsPermissible(S("s1"), SchoolIndex(p, "c1"), TypeIndex(p, "t2"),
                            x, goal, p, /*audit=*/true));
  EXPECT_TRUE(IsPermissible(S("s1"), SchoolIndex(p, "c1"), TypeIndex(p, "t1"),
                            x, goal, p));
  try {
    IsPermissible(S("s1"), SchoolIndex(p, "c1"), TypeIndex(p, "t2"), x, goal, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTypeMismatch);
  }
}

TEST_F(Example5Test, GoldenRun) {
  TtcTrace trace = RunTtc(p, goal, inst.master);
  EXPECT_EQ(trace.outcome,
            Set(p, {{"s1", "c3"}, {"s2", "c1"}, {"s3", "c4"}, {"s4", "c2"},
                    {"s5", "c1"}, {"s6", "c3"}, {"s7", "c2"}}));
  ASSERT_EQ(trace.steps.size(), 5u);

  ASSERT_EQ(trace.steps[0].cycles.size(), 1u);
  const TtcCycle& first = trace.steps[0].cycles[0];
  EXPECT_EQ(first.students, (std::vector<int>{S("s3"), S("s7")}));
  EXPECT_EQ(first.pairs, (std::vector<int>{Pair("c4", "t1"), Pair("c2", "t2")}));

  ASSERT_EQ(trace.steps[1].cycles.size(), 1u);
  const TtcCycle& second = trace.steps[1].cycles[0];
  EXPECT_EQ(second.students, std::vector<int>{S("s4")});
  EXPECT_EQ(second.pairs, std::vector<int>{Pair("c2", "t1")});
  std::vector<int> removed = trace.steps[1].removed_pairs;
  std::sort(removed.begin(), removed.end());
  EXPECT_EQ(removed, (std::vector<int>{Pair("c4", "t1"), Pair("c4", "t2")}));
}

TEST_F(Example5Test, GoalAndIrHold) {
  Matching x = RunTtc(p, goal, inst.master).outcome;
  EXPECT_TRUE(GoalContains(goal, DistributionOf(x, p), p));
  std::vector<int> school_of = AssignmentOf(x, p);
  for (int s = 0; s < p.num_students(); ++s) {
    EXPECT_FALSE(p.Prefers(s, p.initial_school(s), school_of[s]));
  }
}

TEST_F(Example5Test, ViolatedStartFailsFast) {
  PolicyGoal tight = goal;
  tight.ceilings[{SchoolIndex(p, "c1"), TypeIndex(p, "t1")}] = 1;
  try {
    RunTtc(p, tight, inst.master);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPolicyViolatedAtStart);
  }
}

TEST(TtcTest, EveryoneStaysPut) {
  Instance inst = LoadFixture("example5.json");
  Problem p = inst.problem;
  for (int s = 0; s < p.num_students(); ++s) {
    std::vector<int> order = p.preferences(s);
    std::stable_partition(order.begin(), order.end(),
                          [&](int c) { return c == p.initial_school(s); });
    p = p.WithPreferences(s, order);
  }
  TtcTrace trace = RunTtc(p, *inst.policy, {});
  EXPECT_EQ(trace.outcome, InitialMatching(p));
  // A pair points at one holder at a time, so co-holders leave in turn.
  size_t cycles = 0;
  for (const TtcStep& step : trace.steps) {
    for (const TtcCycle& cycle : step.cycles) {
      EXPECT_EQ(cycle.students.size(), 1u);
      ++cycles;
    }
  }
  EXPECT_EQ(cycles, static_cast<size_t>(p.num_students()));
  EXPECT_EQ(trace.steps.size(), 2u);
}

TEST(TtcTest, SingleTypeLiftIsIdentity) {
  Instance inst = LoadFixture("example1.json");
  const Problem& p = inst.problem;
  HypotheticalMarket market = BuildHypothetical(p, {});
  for (int s = 0; s < p.num_students(); ++s) {
    EXPECT_EQ(market.student_prefs[s], p.preferences(s));
    EXPECT_EQ(market.initial_pair[s], p.initial_school(s));
  }
}

TEST(TtcTest, DistrictCeilingsCanGetStuck) {
  Instance inst = LoadFixture("example3_stuck.json");
  try {
    RunTtc(inst.problem, *inst.policy, inst.master);
    FAIL() << "expected Stuck";
  } catch (const TtcStuck& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStuck);
    EXPECT_FALSE(e.trace().steps.empty());
  }
}

TEST(TtcTest, Example3PrintedProfileCompletes) {
  Instance inst = LoadFixture("example3.json");
  TtcTrace trace = RunTtc(inst.problem, *inst.policy, inst.master);
  EXPECT_TRUE(GoalContains(*inst.policy, DistributionOf(trace.outcome, inst.problem),
                           inst.problem));
}

TEST(TtcTest, MasterListChangesPriorities) {
  Instance inst = LoadFixture("example5.json");
  const Problem& p = inst.problem;
  std::vector<int> reversed = {6, 5, 4, 3, 2, 1, 0};
  HypotheticalMarket market = BuildHypothetical(p, reversed);
  int c1t1 = market.pair(0, 0);
  EXPECT_EQ(market.pair_priorities[c1t1][0], 1);
  EXPECT_EQ(market.pair_priorities[c1t1][1], 0);
  EXPECT_EQ(market.pair_priorities[c1t1][2], 6);
}

}  // namespace
}  // namespace interdistrict
