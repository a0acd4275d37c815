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

#include <algorithm>
#include <map>
#include <set>

namespace interdistrict {

std::string_view IssueKindName(ValidationIssue::Kind kind) {
  switch (kind) {
    case ValidationIssue::Kind::kMissingDistrict: return "MissingDistrict";
    case ValidationIssue::Kind::kCapacityShortfall: return "CapacityShortfall";
    case ValidationIssue::Kind::kInfeasibleInitialMatching:
      return "InfeasibleInitialMatching";
    case ValidationIssue::Kind::kIncompletePreference:
      return "IncompletePreference";
    case ValidationIssue::Kind::kDanglingReference: return "DanglingReference";
    case ValidationIssue::Kind::kDuplicateId: return "DuplicateId";
  }
  return "Issue";
}

namespace {

std::string JoinIssues(const std::vector<ValidationIssue>& issues) {
  std::string out = "invalid problem:";
  for (const ValidationIssue& issue : issues) {
    out += "\n  ";
    out += IssueKindName(issue.kind);
    out += ": ";
    out += issue.locus;
  }
  return out;
}

template <typename T>
std::optional<int> IndexOf(const std::vector<T>& items, std::string_view id,
                           const std::string& (*get)(const T&)) {
  for (size_t i = 0; i < items.size(); ++i) {
    if (get(items[i]) == id) return static_cast<int>(i);
  }
  return std::nullopt;
}

}  // namespace

ValidationError::ValidationError(std::vector<ValidationIssue> issues)
    : Error(ErrorCode::kValidation, JoinIssues(issues)),
      issues_(std::move(issues)) {}

bool ValidationError::Has(ValidationIssue::Kind kind) const {
  return std::any_of(issues_.begin(), issues_.end(),
                     [kind](const ValidationIssue& i) { return i.kind == kind; });
}

Problem Problem::Validate(const ProblemSpec& raw) {
  using Kind = ValidationIssue::Kind;
  std::vector<ValidationIssue> issues;
  auto issue = [&issues](Kind kind, std::string locus) {
    issues.push_back({kind, std::move(locus)});
  };

  Problem p;
  std::map<std::string, int> type_index, district_index, school_index,
      student_index;
  for (const std::string& t : raw.types) {
    if (!type_index.emplace(t, p.num_types()).second) {
      issue(Kind::kDuplicateId, "type " + t);
      continue;
    }
    p.types_.push_back(t);
  }
  for (const std::string& d : raw.districts) {
    if (!district_index.emplace(d, p.num_districts()).second) {
      issue(Kind::kDuplicateId, "district " + d);
      continue;
    }
    p.districts_.push_back(d);
  }
  if (p.num_districts() < 2) {
    issue(Kind::kMissingDistrict,
          "need at least two districts, found " +
              std::to_string(p.num_districts()));
  }
  p.district_schools_.assign(p.num_districts(), {});
  for (const ProblemSpec::School& school : raw.schools) {
    if (school_index.count(school.id) != 0) {
      issue(Kind::kDuplicateId, "school " + school.id);
      continue;
    }
    auto d = district_index.find(school.district);
    if (d == district_index.end()) {
      issue(Kind::kDanglingReference,
            "school " + school.id + " names unknown district " +
                school.district);
      continue;
    }
    if (school.capacity < 1) {
      issue(Kind::kCapacityShortfall,
            "school " + school.id + " has capacity " +
                std::to_string(school.capacity));
    }
    int c = p.num_schools();
    school_index.emplace(school.id, c);
    p.schools_.push_back({school.id, d->second, school.capacity});
    p.district_schools_[d->second].push_back(c);
  }
  for (int d = 0; d < p.num_districts(); ++d) {
    if (p.district_schools_[d].empty()) {
      issue(Kind::kMissingDistrict, "district " + p.districts_[d] +
                                        " has no school");
    }
  }

  p.district_size_.assign(p.num_districts(), 0);
  p.type_size_.assign(p.num_types(), 0);
  for (const ProblemSpec::Student& student : raw.students) {
    if (student_index.count(student.id) != 0) {
      issue(Kind::kDuplicateId, "student " + student.id);
      continue;
    }
    StudentData data;
    data.id = student.id;
    bool ok = true;
    auto d = district_index.find(student.district);
    if (d == district_index.end()) {
      issue(Kind::kDanglingReference,
            "student " + student.id + " names unknown district " +
                student.district);
      ok = false;
    } else {
      data.district = d->second;
    }
    auto t = type_index.find(student.type);
    if (t == type_index.end()) {
      issue(Kind::kDanglingReference, "student " + student.id +
                                          " names unknown type " + student.type);
      ok = false;
    } else {
      data.type = t->second;
    }
    data.rank.assign(p.num_schools(), -1);
    for (const std::string& c_id : student.preferences) {
      auto c = school_index.find(c_id);
      if (c == school_index.end()) {
        issue(Kind::kDanglingReference, "student " + student.id +
                                            " ranks unknown school " + c_id);
        ok = false;
        continue;
      }
      if (data.rank[c->second] != -1) {
        issue(Kind::kIncompletePreference,
              "student " + student.id + " ranks " + c_id + " twice");
        ok = false;
        continue;
      }
      data.rank[c->second] = static_cast<int>(data.preferences.size());
      data.preferences.push_back(c->second);
    }
    for (int c = 0; c < p.num_schools(); ++c) {
      if (data.rank[c] == -1) {
        issue(Kind::kIncompletePreference, "student " + student.id +
                                               " does not rank " +
                                               p.schools_[c].id);
        ok = false;
      }
    }
    student_index.emplace(student.id, p.num_students());
    data.initial_school = -1;
    p.students_.push_back(std::move(data));
    if (ok) {
      ++p.district_size_[p.students_.back().district];
      ++p.type_size_[p.students_.back().type];
    }
  }

  for (int d = 0; d < p.num_districts(); ++d) {
    int total = 0;
    for (int c : p.district_schools_[d]) total += p.schools_[c].capacity;
    if (p.district_size_[d] > total) {
      issue(Kind::kCapacityShortfall,
            "district " + p.districts_[d] + " has k_d=" +
                std::to_string(p.district_size_[d]) + " > capacity " +
                std::to_string(total));
    }
  }

  std::vector<int> load(p.num_schools(), 0);
  for (const auto& [s_id, c_id] : raw.initial_matching) {
    auto s = student_index.find(s_id);
    auto c = school_index.find(c_id);
    if (s == student_index.end()) {
      issue(Kind::kDanglingReference,
            "initial matching names unknown student " + s_id);
      continue;
    }
    if (c == school_index.end()) {
      issue(Kind::kDanglingReference,
            "initial matching names unknown school " + c_id);
      continue;
    }
    StudentData& data = p.students_[s->second];
    if (data.initial_school != -1) {
      issue(Kind::kInfeasibleInitialMatching,
            "student " + s_id + " has two initial schools");
      continue;
    }
    data.initial_school = c->second;
    ++load[c->second];
  }
  for (const StudentData& data : p.students_) {
    if (data.initial_school == -1) {
      issue(Kind::kInfeasibleInitialMatching,
            "student " + data.id + " has no initial school");
    }
  }
  for (int c = 0; c < p.num_schools(); ++c) {
    if (load[c] > p.schools_[c].capacity) {
      issue(Kind::kInfeasibleInitialMatching,
            "school " + p.schools_[c].id + " holds " + std::to_string(load[c]) +
                " initial students, capacity " +
                std::to_string(p.schools_[c].capacity));
    }
  }

  if (!issues.empty()) throw ValidationError(std::move(issues));
  return p;
}

std::optional<int> Problem::FindStudent(std::string_view id) const {
  return IndexOf<StudentData>(students_, id,
                              [](const StudentData& s) -> const std::string& {
                                return s.id;
                              });
}

std::optional<int> Problem::FindSchool(std::string_view id) const {
  return IndexOf<SchoolData>(schools_, id,
                             [](const SchoolData& c) -> const std::string& {
                               return c.id;
                             });
}

std::optional<int> Problem::FindDistrict(std::string_view id) const {
  return IndexOf<std::string>(
      districts_, id, [](const std::string& d) -> const std::string& { return d; });
}

std::optional<int> Problem::FindType(std::string_view id) const {
  return IndexOf<std::string>(
      types_, id, [](const std::string& t) -> const std::string& { return t; });
}

Problem Problem::WithPreferences(int s, std::vector<int> order) const {
  Problem copy = *this;
  StudentData& data = copy.students_[s];
  if (static_cast<int>(order.size()) != num_schools()) {
    throw Error(ErrorCode::kValidation,
                "misreport for " + data.id + " is not a full ranking");
  }
  std::vector<int> rank(num_schools(), -1);
  for (size_t i = 0; i < order.size(); ++i) {
    if (order[i] < 0 || order[i] >= num_schools() || rank[order[i]] != -1) {
      throw Error(ErrorCode::kValidation,
                  "misreport for " + data.id + " is not a permutation");
    }
    rank[order[i]] = static_cast<int>(i);
  }
  data.preferences = std::move(order);
  data.rank = std::move(rank);
  return copy;
}

ProblemSpec Problem::ToSpec() const {
  ProblemSpec spec;
  spec.types = types_;
  spec.districts = districts_;
  for (const SchoolData& c : schools_) {
    spec.schools.push_back({c.id, districts_[c.district], c.capacity});
  }
  for (const StudentData& s : students_) {
    ProblemSpec::Student student{s.id, districts_[s.district], types_[s.type],
                                 {}};
    for (int c : s.preferences) student.preferences.push_back(schools_[c].id);
    spec.students.push_back(std::move(student));
    spec.initial_matching.emplace_back(s.id, schools_[s.initial_school].id);
  }
  return spec;
}

Contract MakeContract(const Problem& p, int student, int school) {
  return Contract{student, p.school_district(school), school};
}

ContractSet Normalize(std::vector<Contract> contracts) {
  std::sort(contracts.begin(), contracts.end());
  contracts.erase(std::unique(contracts.begin(), contracts.end()),
                  contracts.end());
  return contracts;
}

bool Contains(const ContractSet& set, const Contract& x) {
  return std::binary_search(set.begin(), set.end(), x);
}

ContractSet Union(const ContractSet& a, const ContractSet& b) {
  ContractSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

ContractSet Difference(const ContractSet& a, const ContractSet& b) {
  ContractSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

bool IsSubset(const ContractSet& a, const ContractSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

ContractSet RestrictToDistrict(const ContractSet& set, int district) {
  ContractSet out;
  for (const Contract& x : set) {
    if (x.district == district) out.push_back(x);
  }
  return out;
}

Matching InitialMatching(const Problem& p) {
  Matching x;
  for (int s = 0; s < p.num_students(); ++s) {
    x.push_back(MakeContract(p, s, p.initial_school(s)));
  }
  return x;
}

Matching MatchingFromAssignment(const Problem& p,
                                const std::vector<int>& school_of) {
  Matching x;
  for (int s = 0; s < static_cast<int>(school_of.size()); ++s) {
    if (school_of[s] >= 0) x.push_back(MakeContract(p, s, school_of[s]));
  }
  return x;
}

std::vector<int> AssignmentOf(const Matching& x, const Problem& p) {
  std::vector<int> school_of(p.num_students(), -1);
  for (const Contract& c : x) {
    if (school_of[c.student] != -1) {
      throw Error(ErrorCode::kDuplicateStudent,
                  "student " + p.student_id(c.student) +
                      " holds more than one contract");
    }
    school_of[c.student] = c.school;
  }
  return school_of;
}

std::string ToString(const Problem& p, const Contract& x) {
  return "(" + p.student_id(x.student) + "," + p.school_id(x.school) + ")";
}

std::string ToString(const Problem& p, const ContractSet& set) {
  std::string out = "{";
  for (size_t i = 0; i < set.size(); ++i) {
    if (i > 0) out += ",";
    out += ToString(p, set[i]);
  }
  return out + "}";
}

int Distribution::SchoolTotal(int c) const {
  int total = 0;
  for (int t = 0; t < num_types_; ++t) total += at(c, t);
  return total;
}

int Distribution::Total() const {
  int total = 0;
  for (int v : counts_) total += v;
  return total;
}

int Distribution::DistrictCount(const Problem& p, int d, int t) const {
  int total = 0;
  for (int c : p.schools_in(d)) total += at(c, t);
  return total;
}

int Distribution::DistrictTotal(const Problem& p, int d) const {
  int total = 0;
  for (int c : p.schools_in(d)) total += SchoolTotal(c);
  return total;
}

Distribution Distribution::Exchanged(int c_out, int t_out, int c_in,
                                     int t_in) const {
  Distribution out = *this;
  --out.at(c_out, t_out);
  ++out.at(c_in, t_in);
  return out;
}

bool Distribution::HasNegative() const {
  return std::any_of(counts_.begin(), counts_.end(),
                     [](int v) { return v < 0; });
}

size_t DistributionHash::operator()(const Distribution& xi) const {
  size_t h = 1469598103934665603ull;
  for (int v : xi.counts()) {
    h ^= static_cast<size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

Distribution DistributionOf(const Matching& x, const Problem& p) {
  if (!IsFeasibleForStudents(x)) {
    AssignmentOf(x, p);  // throws with the offending student
  }
  Distribution xi(p.num_schools(), p.num_types());
  for (const Contract& c : x) ++xi.at(c.school, p.student_type(c.student));
  return xi;
}

std::string ToString(const Problem& p, const Distribution& xi) {
  std::string out;
  for (int c = 0; c < xi.num_schools(); ++c) {
    if (c > 0) out += " ";
    out += p.school_id(c) + ":[";
    for (int t = 0; t < xi.num_types(); ++t) {
      if (t > 0) out += ",";
      out += std::to_string(xi.at(c, t));
    }
    out += "]";
  }
  return out;
}

FeasibilityReport CheckFeasibility(const Matching& x, const Problem& p) {
  FeasibilityReport report;
  std::vector<int> per_student(p.num_students(), 0);
  std::vector<int> per_school(p.num_schools(), 0);
  for (const Contract& c : x) {
    ++per_student[c.student];
    ++per_school[c.school];
  }
  for (int s = 0; s < p.num_students(); ++s) {
    if (per_student[s] > 1) {
      report.feasible_for_students = false;
      report.duplicate_students.push_back(s);
    }
  }
  for (int c = 0; c < p.num_schools(); ++c) {
    if (per_school[c] > p.capacity(c)) {
      report.capacities_respected = false;
      report.over_capacity_schools.push_back(c);
    }
  }
  return report;
}

bool IsFeasibleForStudents(const ContractSet& x) {
  // Sorted by student, so duplicates are adjacent.
  for (size_t i = 1; i < x.size(); ++i) {
    if (x[i].student == x[i - 1].student) return false;
  }
  return true;
}

bool ParetoDominates(const Matching& x, const Matching& y, const Problem& p) {
  std::vector<int> in_x = AssignmentOf(x, p);
  std::vector<int> in_y = AssignmentOf(y, p);
  bool strict = false;
  for (int s = 0; s < p.num_students(); ++s) {
    if (p.Prefers(s, in_y[s], in_x[s])) return false;
    if (p.Prefers(s, in_x[s], in_y[s])) strict = true;
  }
  return strict;
}

int64_t ForEachFeasibleMatching(
    const Problem& p, int64_t budget,
    const std::function<bool(const Matching&)>& visit,
    const std::vector<std::vector<int>>& options) {
  const int n = p.num_students();
  std::vector<std::vector<int>> choice(n);
  double box = 1;
  for (int s = 0; s < n; ++s) {
    if (options.empty()) {
      choice[s].push_back(-1);
      for (int c = 0; c < p.num_schools(); ++c) choice[s].push_back(c);
    } else {
      choice[s] = options[s];
      std::sort(choice[s].begin(), choice[s].end());
    }
    box *= static_cast<double>(choice[s].size());
  }
  if (box > static_cast<double>(budget)) {
    throw Error(ErrorCode::kUniverseTooLarge,
                "feasible-matching box has " + std::to_string(box) +
                    " elements, budget " + std::to_string(budget));
  }

  std::vector<int> load(p.num_schools(), 0);
  std::vector<int> school_of(n, -1);
  int64_t visited = 0;
  bool stop = false;
  std::function<void(int)> recurse = [&](int s) {
    if (stop) return;
    if (s == n) {
      ++visited;
      if (!visit(MatchingFromAssignment(p, school_of))) stop = true;
      return;
    }
    for (int c : choice[s]) {
      if (c >= 0 && load[c] >= p.capacity(c)) continue;
      school_of[s] = c;
      if (c >= 0) ++load[c];
      recurse(s + 1);
      if (c >= 0) --load[c];
      if (stop) return;
    }
    school_of[s] = -1;
  };
  recurse(0);
  return visited;
}

}  // namespace interdistrict
