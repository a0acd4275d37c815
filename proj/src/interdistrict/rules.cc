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

#include "interdistrict/rules.h"

#include <algorithm>
#include <bit>
#include <climits>
#include <functional>
#include <numeric>
#include <thread>

namespace interdistrict {

std::string_view RuleKindName(RuleKind kind) {
  switch (kind) {
    case RuleKind::kSequentialResponsive: return "sequential_responsive";
    case RuleKind::kInitialRespecting: return "initial_respecting";
    case RuleKind::kRationedSequential: return "rationed_sequential";
    case RuleKind::kReservesAndCeilings: return "reserves_and_ceilings";
    case RuleKind::kExplicitTable: return "explicit_table";
  }
  return "unknown";
}

std::optional<RuleKind> ParseRuleKind(std::string_view name) {
  for (RuleKind kind :
       {RuleKind::kSequentialResponsive, RuleKind::kInitialRespecting,
        RuleKind::kRationedSequential, RuleKind::kReservesAndCeilings,
        RuleKind::kExplicitTable}) {
    if (RuleKindName(kind) == name) return kind;
  }
  return std::nullopt;
}

RuleSpec CompletionOf(const RuleSpec& spec) {
  if (spec.kind == RuleKind::kExplicitTable) {
    throw Error(ErrorCode::kNoCompletionConstruction,
                "table rules carry no completion construction");
  }
  RuleSpec out = spec;
  out.completion = true;
  return out;
}

RuleSpec FavoringOwnStudents(RuleSpec spec) {
  spec.favor_own_students = true;
  return spec;
}

namespace {

[[noreturn]] void Invalid(const Problem& p, const RuleSpec& spec,
                          const std::string& what) {
  throw Error(ErrorCode::kValidation,
              "rule for district " + p.district_id(spec.district) + ": " + what);
}

bool IsPermutation(const std::vector<int>& order, int n) {
  if (static_cast<int>(order.size()) != n) return false;
  std::vector<char> seen(n, 0);
  for (int v : order) {
    if (v < 0 || v >= n || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

uint32_t Bit(int i) { return uint32_t{1} << i; }

}  // namespace

AdmissionsRule::AdmissionsRule(const Problem& p, RuleSpec spec)
    : spec_(std::move(spec)) {
  if (spec_.district < 0 || spec_.district >= p.num_districts()) {
    throw Error(ErrorCode::kValidation, "rule names an unknown district");
  }
  const int d = spec_.district;
  num_students_ = p.num_students();
  num_types_ = p.num_types();
  district_size_ = p.district_size(d);
  for (int c = 0; c < p.num_schools(); ++c) {
    capacity_.push_back(p.capacity(c));
    school_district_.push_back(p.school_district(c));
  }
  for (int s = 0; s < p.num_students(); ++s) {
    student_type_.push_back(p.student_type(s));
  }

  if (spec_.kind == RuleKind::kExplicitTable) {
    if (!spec_.table) Invalid(p, spec_, "table rule without a table");
    const ChoiceTable& table = *spec_.table;
    if (table.universe.size() > 31) Invalid(p, spec_, "table universe over 31");
    for (const Contract& x : table.universe) {
      if (x.school < 0 || x.school >= p.num_schools() ||
          p.school_district(x.school) != d || x.student < 0 ||
          x.student >= p.num_students()) {
        Invalid(p, spec_, "table universe holds a foreign contract");
      }
    }
    if (Normalize(table.universe) != table.universe) {
      Invalid(p, spec_, "table universe must be sorted and duplicate-free");
    }
    const int n = static_cast<int>(table.universe.size());
    // Bits of each student's contracts; the universe is sorted by student.
    std::vector<uint32_t> student_bits;
    for (int i = 0; i < n; ++i) {
      if (i == 0 || table.universe[i].student != table.universe[i - 1].student) {
        student_bits.push_back(0);
      }
      student_bits.back() |= Bit(i);
    }
    for (uint64_t m = 0; m < (uint64_t{1} << n); ++m) {
      uint32_t mask = static_cast<uint32_t>(m);
      bool feasible = true;
      for (uint32_t bits : student_bits) {
        if (std::popcount(mask & bits) > 1) feasible = false;
      }
      if (table.domain == ChoiceTable::Domain::kFeasibleSubsets && !feasible) {
        continue;
      }
      auto it = table.chosen.find(mask);
      if (it == table.chosen.end()) {
        Invalid(p, spec_, "table is not total over its domain");
      }
      if ((it->second & ~mask) != 0) {
        Invalid(p, spec_, "table chooses a contract outside its input");
      }
    }
  } else {
    std::vector<int> own = p.schools_in(d);
    std::vector<int> order = spec_.school_order;
    std::sort(own.begin(), own.end());
    std::sort(order.begin(), order.end());
    if (own != order) {
      Invalid(p, spec_, "school_order must list exactly the district's schools");
    }
  }

  if (!spec_.master.empty() && !IsPermutation(spec_.master, num_students_)) {
    Invalid(p, spec_, "master list is not a permutation of the students");
  }
  for (const auto& [c, list] : spec_.priorities) {
    if (c < 0 || c >= p.num_schools() || p.school_district(c) != d) {
      Invalid(p, spec_, "priority list for a school outside the district");
    }
    if (!IsPermutation(list, num_students_)) {
      Invalid(p, spec_, "priority list at " + p.school_id(c) +
                            " is not a permutation of the students");
    }
  }

  if (spec_.type_order.empty()) {
    type_order_.resize(num_types_);
    std::iota(type_order_.begin(), type_order_.end(), 0);
  } else {
    if (!IsPermutation(spec_.type_order, num_types_)) {
      Invalid(p, spec_, "type_order is not a permutation of the types");
    }
    type_order_ = spec_.type_order;
  }

  reserve_.assign(static_cast<size_t>(p.num_schools()) * num_types_, 0);
  ceiling_.assign(static_cast<size_t>(p.num_schools()) * num_types_, INT_MAX);
  for (const auto& [key, value] : spec_.ceilings) {
    auto [c, t] = key;
    if (c < 0 || c >= p.num_schools() || p.school_district(c) != d || t < 0 ||
        t >= num_types_ || value < 0) {
      Invalid(p, spec_, "bad school-type ceiling entry");
    }
    ceiling_[c * num_types_ + t] = value;
  }
  for (const auto& [key, value] : spec_.reserves) {
    auto [c, t] = key;
    if (c < 0 || c >= p.num_schools() || p.school_district(c) != d || t < 0 ||
        t >= num_types_ || value < 0) {
      Invalid(p, spec_, "bad reserve entry");
    }
    if (value > SchoolCeiling(c, t)) {
      Invalid(p, spec_, "reserve above ceiling at " + p.school_id(c));
    }
    reserve_[c * num_types_ + t] = value;
  }
  for (int c : p.schools_in(d)) {
    int total = 0;
    for (int t = 0; t < num_types_; ++t) total += reserve_[c * num_types_ + t];
    if (total > p.capacity(c)) {
      Invalid(p, spec_, "reserves exceed capacity at " + p.school_id(c));
    }
  }
  for (const auto& [t, value] : spec_.district_ceilings) {
    if (t < 0 || t >= num_types_ || value < 0) {
      Invalid(p, spec_, "bad district ceiling entry");
    }
  }
  if (spec_.district_cap && *spec_.district_cap < 0) {
    Invalid(p, spec_, "negative district cap");
  }

  priority_rank_.assign(p.num_schools(), {});
  std::vector<int> base = spec_.master;
  if (base.empty()) {
    base.resize(num_students_);
    std::iota(base.begin(), base.end(), 0);
  }
  for (int c : p.schools_in(d)) {
    auto it = spec_.priorities.find(c);
    std::vector<int> list = it == spec_.priorities.end() ? base : it->second;
    auto key = [&](int s) {
      int initial = spec_.kind == RuleKind::kInitialRespecting &&
                            p.initial_school(s) == c
                        ? 0
                        : 1;
      int own = spec_.favor_own_students && p.student_district(s) == d ? 0 : 1;
      return std::make_pair(initial, own);
    };
    std::stable_sort(list.begin(), list.end(),
                     [&](int a, int b) { return key(a) < key(b); });
    priority_rank_[c].assign(num_students_, 0);
    for (int i = 0; i < num_students_; ++i) priority_rank_[c][list[i]] = i;
  }
}

int AdmissionsRule::SchoolCeiling(int c, int t) const {
  int value = ceiling_[c * num_types_ + t];
  return value == INT_MAX ? capacity_[c] : value;
}

std::optional<int> AdmissionsRule::DistrictCeiling(int t) const {
  auto it = spec_.district_ceilings.find(t);
  if (it == spec_.district_ceilings.end()) return std::nullopt;
  return it->second;
}

ContractSet AdmissionsRule::Choose(const ContractSet& x) const {
  ContractSet own;
  for (const Contract& c : x) {
    if (c.school < 0 || c.school >= static_cast<int>(capacity_.size()) ||
        c.student < 0 || c.student >= num_students_ ||
        school_district_[c.school] != c.district) {
      throw Error(ErrorCode::kUnknownContract,
                  "contract references an undeclared student or school");
    }
    if (c.district == spec_.district) own.push_back(c);
  }
  if (spec_.kind == RuleKind::kExplicitTable) return ChooseFromTable(own);
  return ChooseSequential(own);
}

ContractSet AdmissionsRule::ChooseSequential(const ContractSet& own) const {
  const bool remove = !spec_.completion;
  const bool reserves = spec_.kind == RuleKind::kReservesAndCeilings;
  const bool capped =
      reserves || spec_.kind == RuleKind::kRationedSequential;
  const int cap = capped ? spec_.district_cap.value_or(district_size_) : INT_MAX;

  const int k = static_cast<int>(spec_.school_order.size());
  std::vector<std::vector<int>> applicants(k);
  for (const Contract& x : own) {
    for (int i = 0; i < k; ++i) {
      if (spec_.school_order[i] == x.school) {
        applicants[i].push_back(x.student);
        break;
      }
    }
  }
  for (int i = 0; i < k; ++i) {
    const std::vector<int>& rank = priority_rank_[spec_.school_order[i]];
    std::sort(applicants[i].begin(), applicants[i].end(),
              [&rank](int a, int b) { return rank[a] < rank[b]; });
  }

  std::vector<char> taken(num_students_, 0);
  std::vector<std::vector<char>> picked(k);
  for (int i = 0; i < k; ++i) picked[i].assign(applicants[i].size(), 0);
  std::vector<int> load(k, 0);
  std::vector<int> type_load(static_cast<size_t>(k) * num_types_, 0);
  int total = 0;
  ContractSet out;
  auto accept = [&](int i, int j) {
    int s = applicants[i][j];
    picked[i][j] = 1;
    ++load[i];
    ++type_load[i * num_types_ + student_type_[s]];
    ++total;
    if (remove) taken[s] = 1;
    out.push_back(Contract{s, spec_.district, spec_.school_order[i]});
  };

  if (reserves) {
    for (int i = 0; i < k; ++i) {
      const int c = spec_.school_order[i];
      for (int t : type_order_) {
        const int r = reserve_[c * num_types_ + t];
        int got = 0;
        for (size_t j = 0; j < applicants[i].size(); ++j) {
          if (got >= r || total >= cap) break;
          int s = applicants[i][j];
          if (student_type_[s] != t || picked[i][j] || (remove && taken[s])) {
            continue;
          }
          accept(i, static_cast<int>(j));
          ++got;
        }
      }
    }
  }
  for (int i = 0; i < k; ++i) {
    const int c = spec_.school_order[i];
    for (size_t j = 0; j < applicants[i].size(); ++j) {
      if (load[i] >= capacity_[c] || total >= cap) break;
      int s = applicants[i][j];
      if (picked[i][j] || (remove && taken[s])) continue;
      if (reserves && type_load[i * num_types_ + student_type_[s]] >=
                          SchoolCeiling(c, student_type_[s])) {
        continue;
      }
      accept(i, static_cast<int>(j));
    }
  }
  return Normalize(std::move(out));
}

ContractSet AdmissionsRule::ChooseFromTable(const ContractSet& own) const {
  const ChoiceTable& table = *spec_.table;
  uint32_t mask = 0;
  for (const Contract& x : own) {
    auto it = std::lower_bound(table.universe.begin(), table.universe.end(), x);
    if (it == table.universe.end() || !(*it == x)) {
      throw Error(ErrorCode::kUnknownContract,
                  "contract outside the table universe");
    }
    mask |= Bit(static_cast<int>(it - table.universe.begin()));
  }
  auto it = table.chosen.find(mask);
  if (it == table.chosen.end()) {
    throw Error(ErrorCode::kNotInDomain,
                "set is outside the table's domain (not feasible for students)");
  }
  ContractSet out;
  for (size_t i = 0; i < table.universe.size(); ++i) {
    if (it->second & Bit(static_cast<int>(i))) out.push_back(table.universe[i]);
  }
  return out;
}

RuleProfile MakeProfile(const Problem& p, const std::vector<RuleSpec>& specs) {
  std::vector<const RuleSpec*> by_district(p.num_districts(), nullptr);
  for (const RuleSpec& spec : specs) {
    if (spec.district < 0 || spec.district >= p.num_districts()) {
      throw Error(ErrorCode::kValidation, "rule names an unknown district");
    }
    if (by_district[spec.district] != nullptr) {
      throw Error(ErrorCode::kValidation,
                  "two rules for district " + p.district_id(spec.district));
    }
    by_district[spec.district] = &spec;
  }
  RuleProfile profile;
  for (int d = 0; d < p.num_districts(); ++d) {
    if (by_district[d] == nullptr) {
      throw Error(ErrorCode::kValidation,
                  "no rule for district " + p.district_id(d));
    }
    profile.emplace_back(p, *by_district[d]);
  }
  return profile;
}

std::string_view RulePropertyName(RuleProperty prop) {
  switch (prop) {
    case RuleProperty::kFeasible: return "feasible";
    case RuleProperty::kAcceptant: return "acceptant";
    case RuleProperty::kWeaklyAcceptant: return "weakly-acceptant";
    case RuleProperty::kDWeaklyAcceptant: return "d-weakly-acceptant";
    case RuleProperty::kDistrictCeilings: return "district-ceilings";
    case RuleProperty::kRationed: return "rationed";
    case RuleProperty::kRespectsInitialMatching: return "respects-initial";
    case RuleProperty::kFavorsOwnStudents: return "favors-own";
    case RuleProperty::kSubstitutable: return "substitutable";
    case RuleProperty::kWeaklySubstitutable: return "weakly-substitutable";
    case RuleProperty::kLad: return "lad";
    case RuleProperty::kIrc: return "irc";
    case RuleProperty::kPathIndependent: return "path-independent";
    case RuleProperty::kIsCompletionOf: return "completion-of";
  }
  return "unknown";
}

std::optional<RuleProperty> ParseRuleProperty(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(RuleProperty::kIsCompletionOf); ++i) {
    RuleProperty prop = static_cast<RuleProperty>(i);
    if (RulePropertyName(prop) == name) return prop;
  }
  return std::nullopt;
}

bool QuantifiesOverFeasibleSets(RuleProperty prop) {
  switch (prop) {
    case RuleProperty::kAcceptant:
    case RuleProperty::kWeaklyAcceptant:
    case RuleProperty::kDWeaklyAcceptant:
    case RuleProperty::kDistrictCeilings:
    case RuleProperty::kRationed:
    case RuleProperty::kRespectsInitialMatching:
    case RuleProperty::kFavorsOwnStudents:
    case RuleProperty::kWeaklySubstitutable:
      return true;
    default:
      return false;
  }
}

namespace {

// Shortlex on bitmasks over an ordered universe: fewer elements first, then
// the set whose sorted element list is lexicographically smaller.
bool ShortlexLess(uint32_t a, uint32_t b) {
  int pa = std::popcount(a), pb = std::popcount(b);
  if (pa != pb) return pa < pb;
  uint32_t diff = a ^ b;
  if (diff == 0) return false;
  return (a & (diff & (~diff + 1))) != 0;
}

class SetChecker {
 public:
  SetChecker(const AdmissionsRule& rule, const Problem& p,
             const CheckOptions& opts, bool feasible_only)
      : rule_(rule), p_(p), opts_(opts) {
    const int d = rule.district();
    if (rule.spec().kind == RuleKind::kExplicitTable) {
      universe_ = rule.spec().table->universe;
      if (rule.spec().table->domain ==
          ChoiceTable::Domain::kFeasibleSubsets) {
        feasible_only = true;
      }
    } else {
      for (int s = 0; s < p.num_students(); ++s) {
        for (int c : p.schools_in(d)) universe_.push_back(MakeContract(p, s, c));
      }
      universe_ = Normalize(universe_);
    }
    n_ = static_cast<int>(universe_.size());
    same_student_.assign(n_, 0);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        if (universe_[i].student == universe_[j].student) {
          same_student_[i] |= Bit(j);
        }
      }
    }
    if (n_ > 31) {
      throw Error(ErrorCode::kUniverseTooLarge,
                  "district universe has " + std::to_string(n_) + " contracts");
    }
    if (feasible_only) {
      BuildFeasibleDomain();
    } else {
      if (n_ > opts.max_contracts) {
        throw Error(ErrorCode::kUniverseTooLarge,
                    "all-subsets universe has " + std::to_string(n_) +
                        " contracts, bound " +
                        std::to_string(opts.max_contracts));
      }
      domain_.resize(size_t{1} << n_);
      std::iota(domain_.begin(), domain_.end(), 0u);
    }
    Precompute();
  }

  int size() const { return n_; }
  const std::vector<uint32_t>& domain() const { return domain_; }
  const Contract& contract(int i) const { return universe_[i]; }

  uint32_t Ch(uint32_t mask) const {
    if (dense_) return dense_cache_[mask];
    return sparse_cache_.at(mask);
  }

  bool FeasibleForStudents(uint32_t mask) const {
    for (int i = 0; i < n_; ++i) {
      if ((mask & Bit(i)) && std::popcount(mask & same_student_[i]) > 1) {
        return false;
      }
    }
    return true;
  }

  ContractSet ToSet(uint32_t mask) const {
    ContractSet out;
    for (int i = 0; i < n_; ++i) {
      if (mask & Bit(i)) out.push_back(universe_[i]);
    }
    return out;
  }

  uint32_t ToMask(const ContractSet& set) const {
    uint32_t mask = 0;
    for (const Contract& x : set) {
      auto it = std::lower_bound(universe_.begin(), universe_.end(), x);
      mask |= Bit(static_cast<int>(it - universe_.begin()));
    }
    return mask;
  }

 private:
  void BuildFeasibleDomain() {
    std::vector<std::vector<int>> groups;
    for (int i = 0; i < n_; ++i) {
      if (i == 0 || universe_[i].student != universe_[i - 1].student) {
        groups.emplace_back();
      }
      groups.back().push_back(i);
    }
    double size = 1;
    for (const auto& g : groups) size *= static_cast<double>(g.size() + 1);
    if (size > static_cast<double>(opts_.max_feasible_sets)) {
      throw Error(ErrorCode::kUniverseTooLarge,
                  "feasible-for-students universe has " +
                      std::to_string(static_cast<int64_t>(size)) +
                      " sets, bound " + std::to_string(opts_.max_feasible_sets));
    }
    domain_.push_back(0);
    for (const auto& g : groups) {
      size_t before = domain_.size();
      for (size_t k = 0; k < before; ++k) {
        for (int i : g) domain_.push_back(domain_[k] | Bit(i));
      }
    }
  }

  void Precompute() {
    dense_ = n_ <= 20;
    auto eval = [this](uint32_t mask) {
      return ToMask(rule_.Choose(ToSet(mask)));
    };
    if (dense_) {
      dense_cache_.assign(size_t{1} << n_, 0);
      int threads = std::max(1, opts_.threads);
      std::vector<std::thread> pool;
      for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
          for (size_t k = w; k < domain_.size(); k += threads) {
            dense_cache_[domain_[k]] = eval(domain_[k]);
          }
        });
      }
      for (std::thread& t : pool) t.join();
    } else {
      for (uint32_t mask : domain_) sparse_cache_[mask] = eval(mask);
    }
  }

  const AdmissionsRule& rule_;
  const Problem& p_;
  const CheckOptions& opts_;
  ContractSet universe_;
  int n_ = 0;
  std::vector<uint32_t> same_student_;
  std::vector<uint32_t> domain_;
  bool dense_ = true;
  std::vector<uint32_t> dense_cache_;
  std::unordered_map<uint32_t, uint32_t> sparse_cache_;
};

struct Violation {
  uint32_t set = 0;
  uint32_t chosen = 0;
  int contract = -1;
  int removed = -1;
  std::string detail;
};

using SetTest = std::function<std::optional<Violation>(uint32_t)>;

PropertyVerdict RunOverDomain(const SetChecker& checker, const SetTest& test,
                              int threads) {
  const std::vector<uint32_t>& domain = checker.domain();
  threads = std::max(1, threads);
  std::vector<std::optional<Violation>> best(threads);
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (size_t k = w; k < domain.size(); k += threads) {
        if (best[w] && !ShortlexLess(domain[k], best[w]->set)) continue;
        std::optional<Violation> v = test(domain[k]);
        if (v) best[w] = std::move(v);
      }
    });
  }
  for (std::thread& t : pool) t.join();

  PropertyVerdict verdict;
  verdict.sets_checked = static_cast<int64_t>(domain.size());
  const Violation* winner = nullptr;
  for (const auto& b : best) {
    if (b && (winner == nullptr || ShortlexLess(b->set, winner->set))) {
      winner = &*b;
    }
  }
  if (winner != nullptr) {
    verdict.holds = false;
    PropertyWitness w;
    w.set = checker.ToSet(winner->set);
    w.chosen = checker.ToSet(winner->chosen);
    if (winner->contract >= 0) w.contract = checker.contract(winner->contract);
    if (winner->removed >= 0) w.removed = checker.contract(winner->removed);
    w.detail = winner->detail;
    verdict.witness = std::move(w);
  }
  return verdict;
}

}  // namespace

PropertyVerdict CheckProperty(const AdmissionsRule& rule, RuleProperty prop,
                              const Problem& p, const CheckOptions& opts) {
  if (prop == RuleProperty::kPathIndependent) {
    // Path independence is substitutability plus irrelevance of rejected
    // contracts (Aizerman-Malishevski); report whichever half fails.
    PropertyVerdict sub = CheckProperty(rule, RuleProperty::kSubstitutable, p, opts);
    if (!sub.holds) {
      sub.witness->detail = "not substitutable: " + sub.witness->detail;
      return sub;
    }
    PropertyVerdict irc = CheckProperty(rule, RuleProperty::kIrc, p, opts);
    if (!irc.holds) irc.witness->detail = "IRC fails: " + irc.witness->detail;
    return irc;
  }
  if (prop == RuleProperty::kIsCompletionOf && opts.reference == nullptr) {
    throw Error(ErrorCode::kUsage, "completion check needs a reference rule");
  }

  SetChecker checker(rule, p, opts, QuantifiesOverFeasibleSets(prop));
  const int n = checker.size();
  const int d = rule.district();
  const int k_d = p.district_size(d);

  auto school_load = [&](uint32_t chosen, int c) {
    int load = 0;
    for (int i = 0; i < n; ++i) {
      if ((chosen & Bit(i)) && checker.contract(i).school == c) ++load;
    }
    return load;
  };
  auto school_type_load = [&](uint32_t chosen, int c, int t) {
    int load = 0;
    for (int i = 0; i < n; ++i) {
      const Contract& x = checker.contract(i);
      if ((chosen & Bit(i)) && x.school == c && p.student_type(x.student) == t) {
        ++load;
      }
    }
    return load;
  };
  auto type_load = [&](uint32_t chosen, int t) {
    int load = 0;
    for (int i = 0; i < n; ++i) {
      if ((chosen & Bit(i)) &&
          p.student_type(checker.contract(i).student) == t) {
        ++load;
      }
    }
    return load;
  };

  SetTest test;
  switch (prop) {
    case RuleProperty::kFeasible:
      test = [&](uint32_t x) -> std::optional<Violation> {
        uint32_t ch = checker.Ch(x);
        if ((ch & ~x) != 0) {
          return Violation{x, ch, -1, -1, "chooses outside the input"};
        }
        if (!checker.FeasibleForStudents(ch)) {
          return Violation{x, ch, -1, -1, "chosen set not feasible for students"};
        }
        for (int c : p.schools_in(d)) {
          if (school_load(ch, c) > p.capacity(c)) {
            return Violation{x, ch, -1, -1,
                             "school " + p.school_id(c) + " over capacity"};
          }
        }
        return std::nullopt;
      };
      break;
    case RuleProperty::kAcceptant:
    case RuleProperty::kWeaklyAcceptant:
    case RuleProperty::kDWeaklyAcceptant:
      test = [&](uint32_t x) -> std::optional<Violation> {
        uint32_t ch = checker.Ch(x);
        int total = std::popcount(ch);
        for (int i = 0; i < n; ++i) {
          if (!(x & Bit(i)) || (ch & Bit(i))) continue;
          const Contract& y = checker.contract(i);
          const int t = p.student_type(y.student);
          if (school_load(ch, y.school) == p.capacity(y.school)) continue;
          if (total >= k_d) continue;
          if (prop == RuleProperty::kWeaklyAcceptant &&
              school_type_load(ch, y.school, t) >= rule.SchoolCeiling(y.school, t)) {
            continue;
          }
          if (prop == RuleProperty::kDWeaklyAcceptant) {
            std::optional<int> q = rule.DistrictCeiling(t);
            if (q && type_load(ch, t) >= *q) continue;
          }
          return Violation{x, ch, i, -1,
                           "rejected although nothing binds (district holds " +
                               std::to_string(total) + " of k_d=" +
                               std::to_string(k_d) + ")"};
        }
        return std::nullopt;
      };
      break;
    case RuleProperty::kDistrictCeilings:
      test = [&](uint32_t x) -> std::optional<Violation> {
        uint32_t ch = checker.Ch(x);
        for (int t = 0; t < p.num_types(); ++t) {
          std::optional<int> q = rule.DistrictCeiling(t);
          if (q && type_load(ch, t) > *q) {
            return Violation{x, ch, -1, -1,
                             "chooses " + std::to_string(type_load(ch, t)) +
                                 " of type " + p.type_id(t) + ", ceiling " +
                                 std::to_string(*q)};
          }
        }
        return std::nullopt;
      };
      break;
    case RuleProperty::kRationed:
      test = [&](uint32_t x) -> std::optional<Violation> {
        uint32_t ch = checker.Ch(x);
        if (std::popcount(ch) > k_d) {
          return Violation{x, ch, -1, -1,
                           "chooses " + std::to_string(std::popcount(ch)) +
                               " > k_d=" + std::to_string(k_d)};
        }
        return std::nullopt;
      };
      break;
    case RuleProperty::kRespectsInitialMatching:
      test = [&](uint32_t x) -> std::optional<Violation> {
        uint32_t ch = checker.Ch(x);
        for (int i = 0; i < n; ++i) {
          const Contract& y = checker.contract(i);
          if ((x & Bit(i)) && !(ch & Bit(i)) &&
              p.initial_school(y.student) == y.school) {
            return Violation{x, ch, i, -1, "initial contract rejected"};
          }
        }
        return std::nullopt;
      };
      break;
    case RuleProperty::kFavorsOwnStudents:
      test = [&](uint32_t x) -> std::optional<Violation> {
        uint32_t own = 0;
        for (int i = 0; i < n; ++i) {
          if ((x & Bit(i)) &&
              p.student_district(checker.contract(i).student) == d) {
            own |= Bit(i);
          }
        }
        uint32_t ch = checker.Ch(x);
        uint32_t missing = checker.Ch(own) & ~ch;
        if (missing != 0) {
          return Violation{x, ch, std::countr_zero(missing), -1,
                           "chosen from own students only, dropped from X"};
        }
        return std::nullopt;
      };
      break;
    case RuleProperty::kSubstitutable:
    case RuleProperty::kWeaklySubstitutable:
      test = [&](uint32_t x) -> std::optional<Violation> {
        uint32_t ch = checker.Ch(x);
        for (int i = 0; i < n; ++i) {
          if (!(ch & Bit(i))) continue;
          for (int j = 0; j < n; ++j) {
            if (j == i || !(x & Bit(j))) continue;
            if (!(checker.Ch(x & ~Bit(j)) & Bit(i))) {
              return Violation{x, ch, i, j,
                               "chosen from X but not from X minus the "
                               "removed contract"};
            }
          }
        }
        return std::nullopt;
      };
      break;
    case RuleProperty::kLad:
      test = [&](uint32_t x) -> std::optional<Violation> {
        uint32_t ch = checker.Ch(x);
        for (int j = 0; j < n; ++j) {
          if (!(x & Bit(j))) continue;
          uint32_t smaller = checker.Ch(x & ~Bit(j));
          if (std::popcount(smaller) > std::popcount(ch)) {
            return Violation{x, ch, -1, j,
                             "subset yields " +
                                 std::to_string(std::popcount(smaller)) +
                                 " > " + std::to_string(std::popcount(ch))};
          }
        }
        return std::nullopt;
      };
      break;
    case RuleProperty::kIrc:
      test = [&](uint32_t x) -> std::optional<Violation> {
        uint32_t ch = checker.Ch(x);
        for (int i = 0; i < n; ++i) {
          if (!(x & Bit(i)) || (ch & Bit(i))) continue;
          if (checker.Ch(x & ~Bit(i)) != ch) {
            return Violation{x, ch, i, i,
                             "removing a rejected contract changes the choice"};
          }
        }
        return std::nullopt;
      };
      break;
    case RuleProperty::kIsCompletionOf:
      test = [&](uint32_t x) -> std::optional<Violation> {
        uint32_t ch = checker.Ch(x);
        if (!checker.FeasibleForStudents(ch)) return std::nullopt;
        ContractSet base = opts.reference->Choose(checker.ToSet(x));
        if (checker.ToMask(base) != ch) {
          return Violation{x, ch, -1, -1,
                           "feasible completion value differs from the rule's "
                           "choice " + ToString(p, base)};
        }
        return std::nullopt;
      };
      break;
    case RuleProperty::kPathIndependent:
      break;
  }
  return RunOverDomain(checker, test, opts.threads);
}

PropertyVerdict CheckAccommodatesUnmatched(const RuleProfile& profile,
                                           const Problem& p, int64_t budget) {
  PropertyVerdict verdict;
  ForEachFeasibleMatching(p, budget, [&](const Matching& x) {
    ++verdict.sets_checked;
    std::vector<int> school_of = AssignmentOf(x, p);
    for (int s = 0; s < p.num_students(); ++s) {
      if (school_of[s] != -1) continue;
      bool admitted = false;
      for (int c = 0; c < p.num_schools() && !admitted; ++c) {
        Contract y = MakeContract(p, s, c);
        ContractSet with = x;
        with.push_back(y);
        with = Normalize(std::move(with));
        admitted = Contains(profile[y.district].Choose(with), y);
      }
      if (!admitted) {
        verdict.holds = false;
        verdict.witness = PropertyWitness{
            x, {}, std::nullopt, std::nullopt,
            "student " + p.student_id(s) + " is admitted nowhere"};
        return false;
      }
    }
    return true;
  });
  return verdict;
}

std::string ToString(const Problem& p, const PropertyVerdict& verdict) {
  if (verdict.holds) {
    return "Holds (" + std::to_string(verdict.sets_checked) + " sets)";
  }
  const PropertyWitness& w = *verdict.witness;
  std::string out = "Fails: X=" + ToString(p, w.set);
  out += " Ch(X)=" + ToString(p, w.chosen);
  if (w.contract) out += " x=" + ToString(p, *w.contract);
  if (w.removed && (!w.contract || !(*w.removed == *w.contract))) {
    out += " removed=" + ToString(p, *w.removed);
  }
  if (!w.detail.empty()) out += " (" + w.detail + ")";
  return out;
}

}  // namespace interdistrict
