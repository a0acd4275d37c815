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

// Shared helpers for the test binaries: fixture loading, id-based builders
// and a small random market generator.

#ifndef INTERDISTRICT_TESTS_TEST_FIXTURES_H_
#define INTERDISTRICT_TESTS_TEST_FIXTURES_H_

#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "interdistrict/instance_io.h"
#include "interdistrict/model.h"
#include "interdistrict/policy.h"
#include "interdistrict/rules.h"

namespace interdistrict::testing {

std::string FixturePath(const std::string& name);
Instance LoadFixture(const std::string& name);

int StudentIndex(const Problem& p, const std::string& id);
int SchoolIndex(const Problem& p, const std::string& id);
int TypeIndex(const Problem& p, const std::string& id);
int DistrictIndex(const Problem& p, const std::string& id);

Contract C(const Problem& p, const std::string& student,
           const std::string& school);
// {{"s1", "c2"}, ...}
ContractSet Set(const Problem& p,
                const std::vector<std::pair<std::string, std::string>>& ids);
// {"c1", {{"t1", 1}}} style; missing entries are zero.
Distribution Dist(const Problem& p,
                  const std::map<std::string, std::map<std::string, int>>& ids);
std::vector<int> SchoolOrder(const Problem& p,
                             const std::vector<std::string>& ids);

// Example 3's goal: t1 and t2 capped at `ceiling` in both districts.
PolicyGoal Example3Goal(const Problem& p, int ceiling);

// Problem::Validate, for hand-built markets.
Problem BuildProblem(const ProblemSpec& spec);

struct RandomMarketShape {
  int max_students = 4;
  int max_schools = 4;
  int max_types = 2;
};

// Two districts, each with at least one school and enough capacity for its
// own students; everyone starts at a home-district school.
Problem RandomProblem(std::mt19937& rng, const RandomMarketShape& shape = {});
// One rule per district of the given kind with random school orders and
// priorities. Reserves get random reserves and ceilings that fit capacity.
std::vector<RuleSpec> RandomRules(const Problem& p, RuleKind kind,
                                  std::mt19937& rng);
std::vector<int> RandomPermutation(int n, std::mt19937& rng);

}  // namespace interdistrict::testing

#endif  // INTERDISTRICT_TESTS_TEST_FIXTURES_H_
