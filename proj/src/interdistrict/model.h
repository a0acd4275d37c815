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

// Market instances for interdistrict school choice: students, districts,
// schools, types, contracts, matchings and distributions.

#ifndef INTERDISTRICT_MODEL_H_
#define INTERDISTRICT_MODEL_H_

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "interdistrict/common.h"

namespace interdistrict {

// Raw instance as read from a file. Everything is referenced by string id.
struct ProblemSpec {
  struct School {
    std::string id;
    std::string district;
    int capacity = 0;
  };
  struct Student {
    std::string id;
    std::string district;
    std::string type;
    std::vector<std::string> preferences;
  };
  std::vector<std::string> types;
  std::vector<std::string> districts;
  std::vector<School> schools;
  std::vector<Student> students;
  // student id -> school id
  std::vector<std::pair<std::string, std::string>> initial_matching;
};

struct ValidationIssue {
  enum class Kind {
    kMissingDistrict,
    kCapacityShortfall,
    kInfeasibleInitialMatching,
    kIncompletePreference,
    kDanglingReference,
    kDuplicateId,
  };
  Kind kind;
  std::string locus;
};

std::string_view IssueKindName(ValidationIssue::Kind kind);

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<ValidationIssue> issues);
  const std::vector<ValidationIssue>& issues() const { return issues_; }
  bool Has(ValidationIssue::Kind kind) const;

 private:
  std::vector<ValidationIssue> issues_;
};

// Immutable validated market. Students, schools, districts and types are
// addressed by dense indices in declaration order.
class Problem {
 public:
  // Throws ValidationError listing every violated invariant.
  static Problem Validate(const ProblemSpec& raw);

  int num_students() const { return static_cast<int>(students_.size()); }
  int num_schools() const { return static_cast<int>(schools_.size()); }
  int num_districts() const { return static_cast<int>(districts_.size()); }
  int num_types() const { return static_cast<int>(types_.size()); }

  const std::string& student_id(int s) const { return students_[s].id; }
  const std::string& school_id(int c) const { return schools_[c].id; }
  const std::string& district_id(int d) const { return districts_[d]; }
  const std::string& type_id(int t) const { return types_[t]; }

  std::optional<int> FindStudent(std::string_view id) const;
  std::optional<int> FindSchool(std::string_view id) const;
  std::optional<int> FindDistrict(std::string_view id) const;
  std::optional<int> FindType(std::string_view id) const;

  int student_district(int s) const { return students_[s].district; }
  int student_type(int s) const { return students_[s].type; }
  int initial_school(int s) const { return students_[s].initial_school; }
  // Schools from most to least preferred; the outside option is implicit.
  const std::vector<int>& preferences(int s) const {
    return students_[s].preferences;
  }
  // 0 is the top school; -1 (unmatched) ranks num_schools().
  int rank(int s, int c) const {
    return c < 0 ? num_schools() : students_[s].rank[c];
  }
  // Strict preference of s for school a over school b; -1 is the outside
  // option.
  bool Prefers(int s, int a, int b) const { return rank(s, a) < rank(s, b); }

  int school_district(int c) const { return schools_[c].district; }
  int capacity(int c) const { return schools_[c].capacity; }
  const std::vector<int>& schools_in(int d) const { return district_schools_[d]; }

  // k_d: students whose home district is d.
  int district_size(int d) const { return district_size_[d]; }
  // k^t: students of type t.
  int type_size(int t) const { return type_size_[t]; }

  // Same market with one student's reported ranking replaced.
  Problem WithPreferences(int s, std::vector<int> order) const;

  ProblemSpec ToSpec() const;

 private:
  struct StudentData {
    std::string id;
    int district = 0;
    int type = 0;
    int initial_school = 0;
    std::vector<int> preferences;
    std::vector<int> rank;
  };
  struct SchoolData {
    std::string id;
    int district = 0;
    int capacity = 0;
  };

  std::vector<std::string> types_;
  std::vector<std::string> districts_;
  std::vector<SchoolData> schools_;
  std::vector<StudentData> students_;
  std::vector<std::vector<int>> district_schools_;
  std::vector<int> district_size_;
  std::vector<int> type_size_;
};

// (s, d(c), c). Ordered by student, then school.
struct Contract {
  int student = 0;
  int district = 0;
  int school = 0;

  friend bool operator==(const Contract& a, const Contract& b) {
    return a.student == b.student && a.school == b.school;
  }
  friend std::strong_ordering operator<=>(const Contract& a,
                                          const Contract& b) {
    if (auto cmp = a.student <=> b.student; cmp != 0) return cmp;
    return a.school <=> b.school;
  }
};

// Sorted, duplicate-free. A Matching is any set of contracts; feasibility is
// a separate check.
using ContractSet = std::vector<Contract>;
using Matching = ContractSet;

Contract MakeContract(const Problem& p, int student, int school);
// Sorts and removes duplicates.
ContractSet Normalize(std::vector<Contract> contracts);
bool Contains(const ContractSet& set, const Contract& x);
ContractSet Union(const ContractSet& a, const ContractSet& b);
ContractSet Difference(const ContractSet& a, const ContractSet& b);
bool IsSubset(const ContractSet& a, const ContractSet& b);
// X_d.
ContractSet RestrictToDistrict(const ContractSet& set, int district);

// The initial matching as contracts.
Matching InitialMatching(const Problem& p);
// Builds a matching from student -> school (-1 unmatched).
Matching MatchingFromAssignment(const Problem& p,
                                const std::vector<int>& school_of);
// Student -> school (-1 unmatched). Throws kDuplicateStudent.
std::vector<int> AssignmentOf(const Matching& x, const Problem& p);

std::string ToString(const Problem& p, const Contract& x);
std::string ToString(const Problem& p, const ContractSet& set);

// Dense school-by-type count matrix.
class Distribution {
 public:
  Distribution() = default;
  Distribution(int num_schools, int num_types)
      : num_schools_(num_schools),
        num_types_(num_types),
        counts_(static_cast<size_t>(num_schools) * num_types, 0) {}

  int num_schools() const { return num_schools_; }
  int num_types() const { return num_types_; }
  int at(int c, int t) const { return counts_[c * num_types_ + t]; }
  int& at(int c, int t) { return counts_[c * num_types_ + t]; }
  const std::vector<int>& counts() const { return counts_; }

  int SchoolTotal(int c) const;
  int Total() const;
  // xi_d^t, aggregated on demand.
  int DistrictCount(const Problem& p, int d, int t) const;
  int DistrictTotal(const Problem& p, int d) const;
  // xi - chi_{c_out,t_out} + chi_{c_in,t_in}. May produce a negative entry;
  // callers check HasNegative() when it matters.
  Distribution Exchanged(int c_out, int t_out, int c_in, int t_in) const;
  bool HasNegative() const;

  friend bool operator==(const Distribution&, const Distribution&) = default;
  friend auto operator<=>(const Distribution& a, const Distribution& b) {
    return a.counts_ <=> b.counts_;
  }

 private:
  int num_schools_ = 0;
  int num_types_ = 0;
  std::vector<int> counts_;
};

struct DistributionHash {
  size_t operator()(const Distribution& xi) const;
};

// Throws kDuplicateStudent if x is not feasible for students.
Distribution DistributionOf(const Matching& x, const Problem& p);
std::string ToString(const Problem& p, const Distribution& xi);

struct FeasibilityReport {
  bool feasible_for_students = true;
  bool capacities_respected = true;
  std::vector<int> duplicate_students;
  std::vector<int> over_capacity_schools;

  bool feasible() const { return feasible_for_students && capacities_respected; }
};

FeasibilityReport CheckFeasibility(const Matching& x, const Problem& p);
bool IsFeasibleForStudents(const ContractSet& x);

// Every student weakly better in x and someone strictly better.
bool ParetoDominates(const Matching& x, const Matching& y, const Problem& p);

// Streams every matching that is feasible for students and capacities, in
// lexicographic order of the per-student choice (unmatched first, then
// schools by index). `options[s]` restricts student s (-1 = unmatched); an
// empty `options` means everything. The callback returns false to stop.
// Throws kUniverseTooLarge if the box size exceeds `budget`. Returns the
// number of matchings visited.
int64_t ForEachFeasibleMatching(
    const Problem& p, int64_t budget,
    const std::function<bool(const Matching&)>& visit,
    const std::vector<std::vector<int>>& options = {});

}  // namespace interdistrict

#endif  // INTERDISTRICT_MODEL_H_
