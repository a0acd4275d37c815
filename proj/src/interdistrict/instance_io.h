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

// JSON instance files. Everything is referenced by id; rationals are "p/q"
// strings and distributions are {school: {type: count}} objects.

#ifndef INTERDISTRICT_INSTANCE_IO_H_
#define INTERDISTRICT_INSTANCE_IO_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "interdistrict/model.h"
#include "interdistrict/policy.h"
#include "interdistrict/rules.h"

namespace interdistrict {

struct Instance {
  std::string name;
  std::string version;
  Problem problem;
  std::vector<RuleSpec> rules;
  std::optional<PolicyGoal> policy;
  std::vector<int> master;
  std::optional<Rational> alpha;
};

// Schema problems throw Error(kValidation) with a JSON-path locus; market
// invariants throw ValidationError.
Instance ParseInstance(std::string_view text);
Instance LoadInstance(const std::string& path);

// Canonical pretty-printed form, stable across runs.
std::string SerializeInstance(const Instance& instance);

std::string DistributionJson(const Problem& p, const Distribution& xi);

}  // namespace interdistrict

#endif  // INTERDISTRICT_INSTANCE_IO_H_
