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

#include "interdistrict/oracle.h"

#include <algorithm>
#include <bit>
#include <numeric>
#include <unordered_map>

#include "interdistrict/spda.h"
#include "interdistrict/ttc.h"

namespace interdistrict {

std::vector<Matching> EnumerateStableMatchings(const Problem& p,
                                               const RuleProfile& rules,
                                               int64_t budget) {
  std::vector<Matching> stable;
  ForEachFeasibleMatching(p, budget, [&](const Matching& x) {
    if (CheckStability(x, p, rules).holds) stable.push_back(x);
    return true;
  });
  return stable;
}

std::vector<Matching> ConstrainedEfficientIrMatchings(const Problem& p,
                                                      const PolicyGoal& goal,
                                                      int64_t budget) {
  // A matching that dominates an IR matching is IR itself, so the IR ones
  // are the only candidates and the only possible dominators.
  std::vector<std::vector<int>> options(p.num_students());
  for (int s = 0; s < p.num_students(); ++s) {
    for (int c = 0; c < p.num_schools(); ++c) {
      if (!p.Prefers(s, p.initial_school(s), c)) options[s].push_back(c);
    }
  }
  std::vector<Matching> candidates;
  ForEachFeasibleMatching(
      p, budget,
      [&](const Matching& x) {
        if (GoalContains(goal, DistributionOf(x, p), p)) candidates.push_back(x);
        return true;
      },
      options);
  // Rank vectors make the pairwise dominance scan cheap.
  const int n = p.num_students();
  std::vector<int> ranks(candidates.size() * n);
  for (size_t i = 0; i < candidates.size(); ++i) {
    std::vector<int> school_of = AssignmentOf(candidates[i], p);
    for (int s = 0; s < n; ++s) ranks[i * n + s] = p.rank(s, school_of[s]);
  }
  auto dominates = [&](size_t a, size_t b) {
    bool strict = false;
    for (int s = 0; s < n; ++s) {
      int ra = ranks[a * n + s], rb = ranks[b * n + s];
      if (ra > rb) return false;
      if (ra < rb) strict = true;
    }
    return strict;
  };
  // A dominator has a smaller rank sum, and every dominated candidate is
  // dominated by an efficient one, so scanning by rank sum only needs to
  // compare against the efficient matchings found so far.
  std::vector<size_t> order(candidates.size());
  std::vector<int> sum(candidates.size(), 0);
  for (size_t i = 0; i < candidates.size(); ++i) {
    order[i] = i;
    for (int s = 0; s < n; ++s) sum[i] += ranks[i * n + s];
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return sum[a] < sum[b]; });
  std::vector<size_t> kept;
  for (size_t i : order) {
    bool dominated = std::any_of(kept.begin(), kept.end(),
                                 [&](size_t j) { return dominates(j, i); });
    if (!dominated) kept.push_back(i);
  }
  std::sort(kept.begin(), kept.end());
  std::vector<Matching> efficient;
  for (size_t i : kept) efficient.push_back(candidates[i]);
  return efficient;
}

std::string_view MechanismName(MechanismId id) {
  switch (id) {
    case MechanismId::kSpda: return "spda";
    case MechanismId::kSpdaIntra: return "spda-intra";
    case MechanismId::kTtc: return "ttc";
    case MechanismId::kEfficientSelector: return "efficient-selector";
  }
  return "unknown";
}

std::optional<MechanismId> ParseMechanism(std::string_view name) {
  for (MechanismId id : {MechanismId::kSpda, MechanismId::kSpdaIntra,
                         MechanismId::kTtc, MechanismId::kEfficientSelector}) {
    if (MechanismName(id) == name) return id;
  }
  return std::nullopt;
}

Matching RunMechanism(MechanismId id, const Problem& p,
                      const MechanismContext& context) {
  auto need_rules = [&] {
    if (context.rules == nullptr) {
      throw Error(ErrorCode::kUsage, std::string(MechanismName(id)) +
                                         " needs admissions rules");
    }
    return context.rules;
  };
  auto need_goal = [&] {
    if (context.goal == nullptr) {
      throw Error(ErrorCode::kUsage,
                  std::string(MechanismName(id)) + " needs a policy goal");
    }
    return context.goal;
  };
  switch (id) {
    case MechanismId::kSpda:
      return RunSpda(p, *need_rules()).outcome;
    case MechanismId::kSpdaIntra:
      return RunIntradistrictSpda(p, *need_rules());
    case MechanismId::kTtc:
      return RunTtc(p, *need_goal(), context.master).outcome;
    case MechanismId::kEfficientSelector: {
      std::vector<Matching> efficient =
          ConstrainedEfficientIrMatchings(p, *need_goal());
      if (efficient.empty()) {
        throw Error(ErrorCode::kPolicyViolatedAtStart,
                    "no individually rational matching satisfies the goal");
      }
      return efficient.front();
    }
  }
  throw Error(ErrorCode::kUsage, "unknown mechanism");
}

namespace {

int SchoolOf(const Matching& x, int s) {
  for (const Contract& c : x) {
    if (c.student == s) return c.school;
  }
  return -1;
}

}  // namespace

AuditReport AuditStrategyProofness(MechanismId id, const Problem& p,
                                   const MechanismContext& context,
                                   const AuditConfig& config) {
  AuditReport report;
  report.mechanism = std::string(MechanismName(id));
  std::vector<int> students = config.students;
  if (students.empty()) {
    students.resize(p.num_students());
    std::iota(students.begin(), students.end(), 0);
  }
  // Every student's |C|! reports count as runs; the truthful one reuses
  // the honest outcome.
  auto spend = [&] {
    if (report.runs >= config.budget) {
      report.budget_exceeded = true;
      return false;
    }
    ++report.runs;
    return true;
  };
  if (config.budget <= 0) {
    report.budget_exceeded = true;
    return report;
  }
  const Matching honest = RunMechanism(id, p, context);

  for (int s : students) {
    const std::vector<int>& truth = p.preferences(s);
    const int honest_school = SchoolOf(honest, s);
    std::vector<int> report_order(p.num_schools());
    std::iota(report_order.begin(), report_order.end(), 0);
    do {
      if (!spend()) return report;
      if (report_order == truth) continue;
      Matching deviant =
          RunMechanism(id, p.WithPreferences(s, report_order), context);
      if (p.Prefers(s, SchoolOf(deviant, s), honest_school)) {
        report.findings.push_back({s, truth, report_order, honest, deviant});
        if (config.stop_at_first) return report;
      }
    } while (std::next_permutation(report_order.begin(), report_order.end()));
  }
  report.exhaustive = true;
  return report;
}

ImpossibilityCertificate ReplayExample3Impossibility(const Problem& p,
                                                     const PolicyGoal& goal) {
  std::vector<Matching> efficient = ConstrainedEfficientIrMatchings(p, goal);
  if (efficient.size() != 2) {
    throw Error(ErrorCode::kNotApplicable,
                "expected two constrained efficient matchings, found " +
                    std::to_string(efficient.size()));
  }
  ImpossibilityCertificate cert;
  for (int s = 0; s < p.num_students(); ++s) {
    cert.profile.push_back(p.preferences(s));
  }
  cert.x = efficient[0];
  cert.x_prime = efficient[1];

  auto find_deviation = [&](const Matching& against, const Matching& other) {
    for (int s = 0; s < p.num_students(); ++s) {
      const int wanted = SchoolOf(other, s);
      const int initial = p.initial_school(s);
      if (!p.Prefers(s, wanted, SchoolOf(against, s)) || wanted == initial) {
        continue;
      }
      std::vector<int> misreport = {wanted, initial};
      for (int c : p.preferences(s)) {
        if (c != wanted && c != initial) misreport.push_back(c);
      }
      std::vector<Matching> after =
          ConstrainedEfficientIrMatchings(p.WithPreferences(s, misreport), goal);
      if (after.size() == 1 && after.front() == other) {
        return Deviation{s, misreport, against, after.front()};
      }
    }
    throw Error(ErrorCode::kNotApplicable,
                "no deviation isolates " + ToString(p, other));
  };
  cert.against_x = find_deviation(cert.x, cert.x_prime);
  cert.against_x_prime = find_deviation(cert.x_prime, cert.x);
  return cert;
}

namespace {

// Constraint search over the values Ch(X) for every X feasible for students,
// with forward checking and smallest-domain-first branching.
class ChoiceSearch {
 public:
  ChoiceSearch(const Problem& p, const NonexistenceInstance& instance,
               const SearchOptions& options)
      : p_(p), instance_(instance), options_(options) {
    const int d = instance.district;
    for (int s = 0; s < p.num_students(); ++s) {
      for (int c : p.schools_in(d)) universe_.push_back(MakeContract(p, s, c));
    }
    universe_ = Normalize(universe_);
    n_ = static_cast<int>(universe_.size());
    if (n_ > 24) {
      throw Error(ErrorCode::kUniverseTooLarge,
                  "district universe has " + std::to_string(n_) + " contracts");
    }
    BuildDomain();
    BuildCandidates();
    if (options.symmetry) ApplySymmetry();
    BuildEdges();
  }

  SearchResult Run() {
    SearchResult result;
    result.domain_sets = static_cast<int64_t>(sets_.size());
    alive_count_.assign(sets_.size(), 0);
    alive_.assign(sets_.size(), {});
    value_.assign(sets_.size(), -1);
    for (size_t v = 0; v < sets_.size(); ++v) {
      alive_[v].assign(cands_[v].size(), 1);
      alive_count_[v] = static_cast<int>(cands_[v].size());
    }
    if (!symmetry_note_.empty()) result.refutation.push_back(symmetry_note_);
    bool found = Solve(0, &result.refutation);
    result.nodes = nodes_;
    if (!found) {
      result.status = SearchResult::Status::kUnsatisfiable;
      return result;
    }
    result.status = SearchResult::Status::kSatisfiable;
    result.refutation.clear();
    auto table = std::make_shared<ChoiceTable>();
    table->universe = universe_;
    table->domain = ChoiceTable::Domain::kFeasibleSubsets;
    for (size_t v = 0; v < sets_.size(); ++v) {
      table->chosen[sets_[v]] = cands_[v][value_[v]];
    }
    RuleSpec spec;
    spec.district = instance_.district;
    spec.kind = RuleKind::kExplicitTable;
    spec.district_ceilings = instance_.district_ceilings;
    spec.table = std::move(table);
    result.witness = std::move(spec);
    return result;
  }

 private:
  struct Edge {
    int other;
    int removed;  // bit index of the contract separating the two sets
    bool other_is_subset;
  };

  static uint32_t Bit(int i) { return uint32_t{1} << i; }

  std::string SetName(uint32_t mask) const {
    ContractSet set;
    for (int i = 0; i < n_; ++i) {
      if (mask & Bit(i)) set.push_back(universe_[i]);
    }
    return ToString(p_, set);
  }

  void BuildDomain() {
    // Per student: nothing, or one of her contracts.
    std::vector<std::vector<uint32_t>> per_student(p_.num_students());
    for (int i = 0; i < n_; ++i) {
      per_student[universe_[i].student].push_back(Bit(i));
    }
    sets_ = {0};
    for (const auto& options : per_student) {
      std::vector<uint32_t> next;
      for (uint32_t base : sets_) {
        next.push_back(base);
        for (uint32_t bit : options) next.push_back(base | bit);
      }
      sets_ = std::move(next);
    }
    for (size_t v = 0; v < sets_.size(); ++v) {
      index_[sets_[v]] = static_cast<int>(v);
    }
  }

  bool Admissible(uint32_t x, uint32_t ch) const {
    const int k_d = p_.district_size(instance_.district);
    std::unordered_map<int, int> school_load;
    std::unordered_map<int, int> type_load;
    for (int i = 0; i < n_; ++i) {
      if (!(ch & Bit(i))) continue;
      ++school_load[universe_[i].school];
      ++type_load[p_.student_type(universe_[i].student)];
    }
    for (const auto& [c, load] : school_load) {
      if (load > p_.capacity(c)) return false;
    }
    for (const auto& [t, q] : instance_.district_ceilings) {
      if (type_load[t] > q) return false;
    }
    const int total = std::popcount(ch);
    for (int i = 0; i < n_; ++i) {
      if (!(x & Bit(i)) || (ch & Bit(i))) continue;
      const Contract& y = universe_[i];
      const int t = p_.student_type(y.student);
      if (school_load[y.school] >= p_.capacity(y.school)) continue;
      if (total >= k_d) continue;
      auto q = instance_.district_ceilings.find(t);
      if (q != instance_.district_ceilings.end() && type_load[t] >= q->second) {
        continue;
      }
      return false;
    }
    return true;
  }

  void BuildCandidates() {
    cands_.resize(sets_.size());
    for (size_t v = 0; v < sets_.size(); ++v) {
      const uint32_t x = sets_[v];
      std::vector<uint32_t>& list = cands_[v];
      uint32_t sub = x;
      while (true) {
        if (Admissible(x, sub)) list.push_back(sub);
        if (sub == 0) break;
        sub = (sub - 1) & x;
      }
      // Larger choices first, ties by lower contracts first.
      std::sort(list.begin(), list.end(), [](uint32_t a, uint32_t b) {
        int pa = std::popcount(a), pb = std::popcount(b);
        if (pa != pb) return pa > pb;
        uint32_t diff = a ^ b;
        return (a & (diff & (~diff + 1))) != 0;
      });
    }
  }

  // Every student applying to the district's first school: a solution that
  // picks one student there can be relabelled to pick the first student
  // whenever some symmetry of the instance maps one to the other.
  void ApplySymmetry() {
    if (p_.num_students() == 0 || p_.schools_in(instance_.district).empty()) {
      return;
    }
    const int first_school = p_.schools_in(instance_.district).front();
    uint32_t all = 0;
    for (int i = 0; i < n_; ++i) {
      if (universe_[i].school == first_school) all |= Bit(i);
    }
    auto ceiling = [&](int t) -> std::optional<int> {
      auto it = instance_.district_ceilings.find(t);
      if (it == instance_.district_ceilings.end()) return std::nullopt;
      return it->second;
    };
    const int s0 = 0;
    const int t0 = p_.student_type(s0);
    auto interchangeable = [&](int s) {
      int t = p_.student_type(s);
      return t == t0 ||
             (ceiling(t) == ceiling(t0) && p_.type_size(t) == p_.type_size(t0));
    };
    const int v = index_.at(all);
    std::vector<uint32_t> kept;
    for (uint32_t ch : cands_[v]) {
      if (std::popcount(ch) == 1) {
        int s = universe_[std::countr_zero(ch)].student;
        if (s != s0 && interchangeable(s)) continue;
      }
      kept.push_back(ch);
    }
    if (kept.size() != cands_[v].size()) {
      symmetry_note_ = "symmetry: single choices from " + SetName(all) +
                       " restricted to student " + p_.student_id(s0);
    }
    cands_[v] = std::move(kept);
  }

  void BuildEdges() {
    edges_.resize(sets_.size());
    for (size_t v = 0; v < sets_.size(); ++v) {
      const uint32_t x = sets_[v];
      for (int j = 0; j < n_; ++j) {
        if (!(x & Bit(j))) continue;
        int u = index_.at(x & ~Bit(j));
        edges_[v].push_back({u, j, true});
        edges_[u].push_back({static_cast<int>(v), j, false});
      }
    }
  }

  // Weak substitutability and IRC between Ch(X) and Ch(X - y).
  static bool Consistent(uint32_t ch_big, uint32_t ch_small, int removed) {
    const uint32_t y = Bit(removed);
    if ((ch_big & ~y & ~ch_small) != 0) return false;
    if (!(ch_big & y) && ch_small != ch_big) return false;
    return true;
  }

  // Prunes neighbours of v; returns the wiped-out set, or -1.
  int Propagate(int v, std::vector<std::pair<int, int>>* trail) {
    const uint32_t ch = cands_[v][value_[v]];
    for (const Edge& e : edges_[v]) {
      if (value_[e.other] >= 0) continue;
      std::vector<char>& alive = alive_[e.other];
      for (size_t k = 0; k < alive.size(); ++k) {
        if (!alive[k]) continue;
        uint32_t other = cands_[e.other][k];
        bool ok = e.other_is_subset ? Consistent(ch, other, e.removed)
                                    : Consistent(other, ch, e.removed);
        if (!ok) {
          alive[k] = 0;
          --alive_count_[e.other];
          trail->emplace_back(e.other, static_cast<int>(k));
        }
      }
      if (alive_count_[e.other] == 0) return e.other;
    }
    return -1;
  }

  void Undo(std::vector<std::pair<int, int>>* trail) {
    for (const auto& [u, k] : *trail) {
      alive_[u][k] = 1;
      ++alive_count_[u];
    }
    trail->clear();
  }

  bool Solve(int depth, std::vector<std::string>* notes) {
    if (++nodes_ > options_.node_budget) {
      throw Error(ErrorCode::kSearchBudgetExceeded,
                  "gave up after " + std::to_string(options_.node_budget) +
                      " nodes");
    }
    int best = -1;
    for (size_t v = 0; v < sets_.size(); ++v) {
      if (value_[v] >= 0) continue;
      if (best < 0 || alive_count_[v] < alive_count_[best]) {
        best = static_cast<int>(v);
      }
    }
    if (best < 0) return true;
    for (size_t k = 0; k < cands_[best].size(); ++k) {
      if (!alive_[best][k]) continue;
      value_[best] = static_cast<int>(k);
      std::vector<std::pair<int, int>> trail;
      const int64_t before = nodes_;
      int wiped = Propagate(best, &trail);
      if (wiped < 0) {
        if (depth == 0) first_wipe_ = -1;
        if (Solve(depth + 1, notes)) return true;
      } else if (first_wipe_ < 0) {
        first_wipe_ = wiped;
      }
      if (depth == 0) {
        std::string line = "case Ch(" + SetName(sets_[best]) + ") = " +
                           SetName(cands_[best][k]) + ": refuted after " +
                           std::to_string(nodes_ - before) + " nodes";
        if (first_wipe_ >= 0) {
          line += "; first empty domain at " + SetName(sets_[first_wipe_]);
        }
        notes->push_back(line);
        first_wipe_ = -1;
      }
      Undo(&trail);
      value_[best] = -1;
    }
    return false;
  }

  const Problem& p_;
  NonexistenceInstance instance_;
  SearchOptions options_;
  ContractSet universe_;
  int n_ = 0;
  std::vector<uint32_t> sets_;
  std::unordered_map<uint32_t, int> index_;
  std::vector<std::vector<uint32_t>> cands_;
  std::vector<std::vector<Edge>> edges_;
  std::vector<std::vector<char>> alive_;
  std::vector<int> alive_count_;
  std::vector<int> value_;
  int64_t nodes_ = 0;
  int first_wipe_ = -1;
  std::string symmetry_note_;
};

}  // namespace

SearchResult SearchRuleNonexistence(const Problem& p,
                                    const NonexistenceInstance& instance,
                                    const SearchOptions& options) {
  if (instance.district < 0 || instance.district >= p.num_districts()) {
    throw Error(ErrorCode::kValidation, "no such district");
  }
  ChoiceSearch search(p, instance, options);
  return search.Run();
}

}  // namespace interdistrict
