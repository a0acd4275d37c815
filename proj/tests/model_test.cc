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

#include "interdistrict/model.h"

#include <gtest/gtest.h>

#include <random>

#include "test_fixtures.h"

namespace interdistrict {
namespace {

using testing::C;
using testing::Dist;
using testing::LoadFixture;
using testing::Set;

ProblemSpec Example1Spec() { return LoadFixture("example1.json").problem.ToSpec(); }

TEST(ValidateTest, AcceptsExample1) {
  Problem p = Problem::Validate(Example1Spec());
  EXPECT_EQ(p.num_students(), 4);
  EXPECT_EQ(p.num_schools(), 3);
  EXPECT_EQ(p.num_districts(), 2);
  EXPECT_EQ(p.district_size(0), 2);
  EXPECT_EQ(p.district_size(1), 2);
  EXPECT_EQ(p.type_size(0), 4);
}

TEST(ValidateTest, OneDistrictIsMissingDistrict) {
  ProblemSpec spec = Example1Spec();
  spec.districts = {"d1"};
  for (auto& c : spec.schools) c.district = "d1";
  for (auto& s : spec.students) s.district = "d1";
  try {
    Problem::Validate(spec);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_TRUE(e.Has(ValidationIssue::Kind::kMissingDistrict));
  }
}

TEST(ValidateTest, ZeroCapacityIsShortfallForD1) {
  ProblemSpec spec = Example1Spec();
  spec.schools[0].capacity = 0;
  spec.schools[1].capacity = 0;
  try {
    Problem::Validate(spec);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_TRUE(e.Has(ValidationIssue::Kind::kCapacityShortfall));
    bool named = false;
    for (const auto& issue : e.issues()) {
      if (issue.kind == ValidationIssue::Kind::kCapacityShortfall &&
          issue.locus.find("d1") != std::string::npos) {
        named = true;
      }
    }
    EXPECT_TRUE(named);
  }
}

TEST(ValidateTest, IncompletePreferenceAndDanglingReference) {
  ProblemSpec spec = Example1Spec();
  spec.students[0].preferences.pop_back();
  spec.students[1].preferences[0] = "c9";
  try {
    Problem::Validate(spec);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_TRUE(e.Has(ValidationIssue::Kind::kIncompletePreference));
  }
}

TEST(ValidateTest, OverfullInitialMatching) {
  ProblemSpec spec = Example1Spec();
  // c1 has capacity 1.
  spec.initial_matching[1].second = "c1";
  try {
    Problem::Validate(spec);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_TRUE(e.Has(ValidationIssue::Kind::kInfeasibleInitialMatching));
  }
}

TEST(DistributionTest, Example1Outcome) {
  Problem p = LoadFixture("example1.json").problem;
  Matching x = Set(p, {{"s1", "c2"}, {"s2", "c3"}, {"s3", "c1"}, {"s4", "c2"}});
  Distribution xi = DistributionOf(x, p);
  EXPECT_EQ(xi, Dist(p, {{"c1", {{"t", 1}}}, {"c2", {{"t", 2}}}, {"c3", {{"t", 1}}}}));
  EXPECT_EQ(xi.DistrictTotal(p, 0), 3);
}

TEST(DistributionTest, EmptyIsZero) {
  Problem p = LoadFixture("example1.json").problem;
  Distribution xi = DistributionOf({}, p);
  EXPECT_EQ(xi.Total(), 0);
  EXPECT_EQ(xi, Distribution(3, 1));
}

TEST(DistributionTest, ReservesFixtureDistrictCounts) {
  Problem p = LoadFixture("appendixC.json").problem;
  Matching x = Set(p, {{"s1", "c2"}, {"s2", "c3"}, {"s3", "c2"}, {"s4", "c1"},
                       {"s5", "c1"}, {"s6", "c4"}, {"s7", "c3"}});
  Distribution xi = DistributionOf(x, p);
  EXPECT_EQ(xi.DistrictCount(p, 0, 0), 2);
  EXPECT_EQ(xi.DistrictCount(p, 0, 1), 2);
  EXPECT_EQ(xi.DistrictCount(p, 1, 0), 2);
  EXPECT_EQ(xi.DistrictCount(p, 1, 1), 1);
}

TEST(DistributionTest, DuplicateStudentThrows) {
  Problem p = LoadFixture("example1.json").problem;
  try {
    DistributionOf(Set(p, {{"s1", "c1"}, {"s1", "c2"}}), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateStudent);
  }
}

TEST(DistributionTest, ExchangedMovesOneUnit) {
  Problem p = LoadFixture("example3.json").problem;
  Distribution xi = DistributionOf(InitialMatching(p), p);
  Distribution moved = xi.Exchanged(0, 0, 1, 1);
  EXPECT_EQ(moved.at(0, 0), xi.at(0, 0) - 1);
  EXPECT_EQ(moved.at(1, 1), xi.at(1, 1) + 1);
  EXPECT_EQ(moved.Total(), xi.Total());
  EXPECT_TRUE(xi.Exchanged(1, 0, 0, 0).HasNegative());
}

TEST(FeasibilityTest, Example1Initial) {
  Problem p = LoadFixture("example1.json").problem;
  FeasibilityReport r = CheckFeasibility(InitialMatching(p), p);
  EXPECT_TRUE(r.feasible_for_students);
  EXPECT_TRUE(r.capacities_respected);
}

TEST(FeasibilityTest, DuplicateStudent) {
  Problem p = LoadFixture("example1.json").problem;
  FeasibilityReport r = CheckFeasibility(Set(p, {{"s1", "c1"}, {"s1", "c2"}}), p);
  EXPECT_FALSE(r.feasible_for_students);
  EXPECT_EQ(r.duplicate_students, std::vector<int>{0});
}

TEST(FeasibilityTest, OverCapacity) {
  Problem p = LoadFixture("example1.json").problem;
  FeasibilityReport r =
      CheckFeasibility(Set(p, {{"s1", "c1"}, {"s2", "c1"}, {"s3", "c1"}}), p);
  EXPECT_TRUE(r.feasible_for_students);
  EXPECT_FALSE(r.capacities_respected);
  EXPECT_EQ(r.over_capacity_schools, std::vector<int>{0});
}

TEST(ParetoTest, Example3NeitherDominates) {
  Problem p = LoadFixture("example3.json").problem;
  // The two goal-satisfying efficient matchings of the example.
  Matching x = Set(p, {{"s1", "c6"}, {"s2", "c2"}, {"s3", "c4"}, {"s4", "c3"},
                       {"s5", "c5"}, {"s6", "c1"}});
  Matching x_prime = Set(p, {{"s1", "c1"}, {"s2", "c6"}, {"s3", "c5"},
                             {"s4", "c4"}, {"s5", "c3"}, {"s6", "c2"}});
  EXPECT_FALSE(ParetoDominates(x, x_prime, p));
  EXPECT_FALSE(ParetoDominates(x_prime, x, p));
  EXPECT_FALSE(ParetoDominates(x, x, p));
}

TEST(ParetoTest, RespectingOutcomeDominatesInitial) {
  Problem p = LoadFixture("example1.json").problem;
  Matching x = Set(p, {{"s1", "c1"}, {"s2", "c3"}, {"s3", "c2"}, {"s4", "c2"}});
  EXPECT_TRUE(ParetoDominates(x, InitialMatching(p), p));
  EXPECT_FALSE(ParetoDominates(InitialMatching(p), x, p));
}

// Independent count: place students one at a time with capacity pruning.
int64_t CountRecursive(const Problem& p, int s, std::vector<int>& load) {
  if (s == p.num_students()) return 1;
  int64_t total = CountRecursive(p, s + 1, load);
  for (int c = 0; c < p.num_schools(); ++c) {
    if (load[c] == p.capacity(c)) continue;
    ++load[c];
    total += CountRecursive(p, s + 1, load);
    --load[c];
  }
  return total;
}

TEST(EnumerationTest, Example1CountMatchesRecursiveFormula) {
  Problem p = LoadFixture("example1.json").problem;
  int64_t streamed = 0;
  ForEachFeasibleMatching(p, 1'000'000, [&](const Matching& x) {
    EXPECT_TRUE(CheckFeasibility(x, p).feasible());
    ++streamed;
    return true;
  });
  std::vector<int> load(p.num_schools(), 0);
  EXPECT_EQ(streamed, CountRecursive(p, 0, load));
}

TEST(EnumerationTest, OneStudentTwoSchools) {
  ProblemSpec spec;
  spec.types = {"t"};
  spec.districts = {"d1", "d2"};
  spec.schools = {{"c1", "d1", 1}, {"c2", "d2", 1}};
  spec.students = {{"s1", "d1", "t", {"c1", "c2"}}};
  spec.initial_matching = {{"s1", "c1"}};
  Problem p = Problem::Validate(spec);
  std::vector<Matching> seen;
  ForEachFeasibleMatching(p, 100, [&](const Matching& x) {
    seen.push_back(x);
    return true;
  });
  ASSERT_EQ(seen.size(), 3u);
  EXPECT_TRUE(seen[0].empty());
}

TEST(EnumerationTest, NoStudentsYieldsEmptyMatching) {
  ProblemSpec spec;
  spec.types = {"t"};
  spec.districts = {"d1", "d2"};
  spec.schools = {{"c1", "d1", 1}, {"c2", "d2", 1}};
  Problem p = Problem::Validate(spec);
  int count = 0;
  ForEachFeasibleMatching(p, 100, [&](const Matching& x) {
    EXPECT_TRUE(x.empty());
    ++count;
    return true;
  });
  EXPECT_EQ(count, 1);
}

TEST(EnumerationTest, BudgetThrows) {
  Problem p = LoadFixture("appendixC.json").problem;
  try {
    ForEachFeasibleMatching(p, 10, [](const Matching&) { return true; });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUniverseTooLarge);
  }
}

TEST(ModelPropertyTest, AdditiveAndCountingOnRandomMarkets) {
  std::mt19937 rng(7);
  for (int round = 0; round < 30; ++round) {
    Problem p = testing::RandomProblem(rng);
    std::vector<Matching> all;
    ForEachFeasibleMatching(p, 1'000'000, [&](const Matching& x) {
      all.push_back(x);
      return true;
    });
    for (const Matching& x : all) {
      Distribution xi = DistributionOf(x, p);
      EXPECT_EQ(xi.Total(), static_cast<int>(x.size()));
      // Split by student parity and add back.
      Matching a, b;
      for (const Contract& k : x) (k.student % 2 ? a : b).push_back(k);
      Distribution sum = DistributionOf(a, p);
      Distribution xb = DistributionOf(b, p);
      for (int c = 0; c < p.num_schools(); ++c) {
        for (int t = 0; t < p.num_types(); ++t) sum.at(c, t) += xb.at(c, t);
      }
      EXPECT_EQ(sum, xi);
    }
    // Irreflexive and transitive.
    for (const Matching& x : all) EXPECT_FALSE(ParetoDominates(x, x, p));
    if (all.size() > 200) continue;
    for (const Matching& x : all) {
      for (const Matching& y : all) {
        if (!ParetoDominates(x, y, p)) continue;
        for (const Matching& z : all) {
          if (ParetoDominates(y, z, p)) EXPECT_TRUE(ParetoDominates(x, z, p));
        }
      }
    }
  }
}

TEST(ModelTest, AssignmentRoundTrip) {
  Problem p = LoadFixture("example5.json").problem;
  Matching x = InitialMatching(p);
  EXPECT_EQ(MatchingFromAssignment(p, AssignmentOf(x, p)), x);
  EXPECT_EQ(ToString(p, C(p, "s1", "c1")), "(s1,c1)");
}

}  // namespace
}  // namespace interdistrict
