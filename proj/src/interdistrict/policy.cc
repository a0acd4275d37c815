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

#include "interdistrict/policy.h"

#include <algorithm>
#include <cstdlib>
#include <unordered_map>

namespace interdistrict {

bool InXi0(const Distribution& xi, const Problem& p) {
  if (xi.HasNegative()) return false;
  int total = 0;
  for (int c = 0; c < p.num_schools(); ++c) {
    int load = xi.SchoolTotal(c);
    if (load > p.capacity(c)) return false;
    total += load;
  }
  return total == p.num_students();
}

std::vector<Distribution> EnumerateXi0(const Problem& p, int64_t bound) {
  const int num_c = p.num_schools();
  const int num_t = p.num_types();
  double box = 1;
  for (int c = 0; c < num_c; ++c) {
    for (int t = 0; t < num_t; ++t) box *= p.capacity(c) + 1;
  }
  if (box > static_cast<double>(bound)) {
    throw Error(ErrorCode::kUniverseTooLarge,
                "distribution box has " + std::to_string(box) +
                    " points, bound " + std::to_string(bound));
  }
  // suffix_capacity[c]: seats in schools c..end.
  std::vector<int> suffix_capacity(num_c + 1, 0);
  for (int c = num_c - 1; c >= 0; --c) {
    suffix_capacity[c] = suffix_capacity[c + 1] + p.capacity(c);
  }
  std::vector<Distribution> out;
  Distribution xi(num_c, num_t);
  const int total = p.num_students();
  std::function<void(int, int, int, int)> fill = [&](int c, int t, int placed,
                                                    int school_load) {
    if (c == num_c) {
      if (placed == total) out.push_back(xi);
      return;
    }
    if (t == num_t) {
      if (total - placed > suffix_capacity[c + 1]) return;
      fill(c + 1, 0, placed, 0);
      return;
    }
    int room = std::min(p.capacity(c) - school_load, total - placed);
    for (int v = 0; v <= room; ++v) {
      xi.at(c, t) = v;
      fill(c, t + 1, placed + v, school_load + v);
    }
    xi.at(c, t) = 0;
  };
  if (total <= suffix_capacity[0]) fill(0, 0, 0, 0);
  return out;
}

PolicyFunction PolicyFunction::ManhattanIdeal(const Problem& p,
                                              Distribution ideal) {
  if (ideal.num_schools() != p.num_schools() ||
      ideal.num_types() != p.num_types() || !InXi0(ideal, p)) {
    throw Error(ErrorCode::kValidation,
                "ideal distribution must lie in the everyone-matched, "
                "within-capacity set");
  }
  PolicyFunction f;
  f.kind_ = Kind::kManhattanIdeal;
  f.ideal_ = std::move(ideal);
  return f;
}

PolicyFunction PolicyFunction::Indicator(const Problem& p,
                                         const std::vector<Distribution>& set) {
  PolicyFunction f;
  f.kind_ = Kind::kIndicator;
  f.set_list_ = set;
  f.set_ = std::make_shared<DistributionSet>(set.begin(), set.end());
  for (int c = 0; c < p.num_schools(); ++c) f.capacities_.push_back(p.capacity(c));
  f.total_ = p.num_students();
  return f;
}

PolicyFunction PolicyFunction::Table(std::map<Distribution, Rational> values,
                                     Rational fallback) {
  PolicyFunction f;
  f.kind_ = Kind::kTable;
  f.table_ = std::move(values);
  f.fallback_ = fallback;
  return f;
}

Rational PolicyFunction::operator()(const Distribution& xi) const {
  switch (kind_) {
    case Kind::kManhattanIdeal: {
      int64_t distance = 0;
      for (size_t i = 0; i < xi.counts().size(); ++i) {
        distance += std::abs(xi.counts()[i] - ideal_.counts()[i]);
      }
      return Rational(-distance);
    }
    case Kind::kIndicator: {
      if (xi.HasNegative() || xi.Total() != total_) return Rational(0);
      for (int c = 0; c < xi.num_schools(); ++c) {
        if (xi.SchoolTotal(c) > capacities_[c]) return Rational(0);
      }
      return Rational(set_->count(xi) ? 1 : 0);
    }
    case Kind::kTable: {
      auto it = table_.find(xi);
      return it == table_.end() ? fallback_ : it->second;
    }
  }
  return Rational(0);
}

PolicyFunction IndicatorOf(const std::vector<Distribution>& set,
                           const Problem& p) {
  return PolicyFunction::Indicator(p, set);
}

std::string_view PolicyFormName(PolicyGoal::Form form) {
  switch (form) {
    case PolicyGoal::Form::kExplicitSet: return "explicit_set";
    case PolicyGoal::Form::kBalancedExchange: return "balanced_exchange";
    case PolicyGoal::Form::kSchoolDiversity: return "school_diversity";
    case PolicyGoal::Form::kCombination: return "combination";
    case PolicyGoal::Form::kFLambda: return "f_lambda";
    case PolicyGoal::Form::kDistrictCeilings: return "district_ceilings";
  }
  return "unknown";
}

std::optional<PolicyGoal::Form> ParsePolicyForm(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(PolicyGoal::Form::kDistrictCeilings);
       ++i) {
    auto form = static_cast<PolicyGoal::Form>(i);
    if (PolicyFormName(form) == name) return form;
  }
  return std::nullopt;
}

namespace {

bool Balanced(const Distribution& xi, const Problem& p) {
  for (int d = 0; d < p.num_districts(); ++d) {
    if (xi.DistrictTotal(p, d) != p.district_size(d)) return false;
  }
  return true;
}

bool WithinSchoolBounds(const Distribution& xi, const Problem& p,
                        const SchoolTypeBounds& floors,
                        const SchoolTypeBounds& ceilings) {
  for (const auto& [key, value] : floors) {
    if (xi.at(key.first, key.second) < value) return false;
  }
  for (const auto& [key, value] : ceilings) {
    if (xi.at(key.first, key.second) > value) return false;
  }
  (void)p;
  return true;
}

}  // namespace

bool GoalContains(const PolicyGoal& goal, const Distribution& xi,
                  const Problem& p) {
  if (xi.HasNegative()) return false;
  bool in = false;
  switch (goal.form) {
    case PolicyGoal::Form::kExplicitSet:
      in = std::find(goal.explicit_set.begin(), goal.explicit_set.end(), xi) !=
           goal.explicit_set.end();
      break;
    case PolicyGoal::Form::kBalancedExchange:
      in = Balanced(xi, p);
      break;
    case PolicyGoal::Form::kSchoolDiversity:
      in = WithinSchoolBounds(xi, p, goal.floors, goal.ceilings);
      break;
    case PolicyGoal::Form::kCombination:
      in = Balanced(xi, p) &&
           WithinSchoolBounds(xi, p, goal.floors, goal.ceilings);
      break;
    case PolicyGoal::Form::kFLambda:
      in = goal.function && (*goal.function)(xi) >= goal.lambda;
      break;
    case PolicyGoal::Form::kDistrictCeilings:
      in = true;
      for (const auto& [key, value] : goal.district_ceilings) {
        if (xi.DistrictCount(p, key.first, key.second) > value) in = false;
      }
      for (int c = 0; c < p.num_schools() && in; ++c) {
        if (xi.SchoolTotal(c) > p.capacity(c)) in = false;
      }
      break;
  }
  return in && (!goal.intersect_xi0 || InXi0(xi, p));
}

std::vector<Distribution> GoalWithinXi0(const PolicyGoal& goal,
                                        const Problem& p) {
  std::vector<Distribution> out;
  for (Distribution& xi : EnumerateXi0(p)) {
    if (GoalContains(goal, xi, p)) out.push_back(std::move(xi));
  }
  return out;
}

bool ExchangeSucceeds(const DistributionSet& set, const Distribution& xi,
                      const Distribution& xi_tilde, int c, int t) {
  for (int c2 = 0; c2 < xi.num_schools(); ++c2) {
    for (int t2 = 0; t2 < xi.num_types(); ++t2) {
      if (xi.at(c2, t2) >= xi_tilde.at(c2, t2)) continue;
      if (set.count(xi.Exchanged(c, t, c2, t2)) &&
          set.count(xi_tilde.Exchanged(c2, t2, c, t))) {
        return true;
      }
    }
  }
  return false;
}

MConvexVerdict IsMConvex(const std::vector<Distribution>& set) {
  std::vector<Distribution> sorted = set;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  MConvexVerdict verdict;
  if (sorted.empty()) return verdict;
  const int num_t = sorted[0].num_types();
  const int n = sorted[0].num_schools() * num_t;
  std::unordered_map<Distribution, int, DistributionHash> index;
  for (size_t k = 0; k < sorted.size(); ++k) index.emplace(sorted[k], static_cast<int>(k));
  // moved[k][i * n + j]: member index of sorted[k] - e_i + e_j, or -1.
  std::vector<std::vector<int>> moved(sorted.size(), std::vector<int>(n * n, -1));
  for (size_t k = 0; k < sorted.size(); ++k) {
    const std::vector<int>& v = sorted[k].counts();
    for (int i = 0; i < n; ++i) {
      if (v[i] == 0) continue;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        auto it = index.find(
            sorted[k].Exchanged(i / num_t, i % num_t, j / num_t, j % num_t));
        if (it != index.end()) moved[k][i * n + j] = it->second;
      }
    }
  }
  for (size_t a = 0; a < sorted.size(); ++a) {
    const std::vector<int>& xi = sorted[a].counts();
    for (size_t b = 0; b < sorted.size(); ++b) {
      if (a == b) continue;
      const std::vector<int>& xi_tilde = sorted[b].counts();
      for (int i = 0; i < n; ++i) {
        if (xi[i] <= xi_tilde[i]) continue;
        bool exchanged = false;
        for (int j = 0; j < n && !exchanged; ++j) {
          exchanged = xi[j] < xi_tilde[j] && moved[a][i * n + j] >= 0 &&
                      moved[b][j * n + i] >= 0;
        }
        if (!exchanged) {
          verdict.holds = false;
          verdict.witness = MConvexWitness{sorted[a], sorted[b], i / num_t, i % num_t};
          return verdict;
        }
      }
    }
  }
  return verdict;
}

PseudoConcavityVerdict IsPseudoMConcave(const PolicyFunction& f,
                                        const Problem& p, int64_t bound) {
  std::vector<Distribution> xi0 = EnumerateXi0(p, bound);
  // Exchanged points are only admitted inside Xi^0, where the contour sets
  // live; f is cached there.
  std::unordered_map<Distribution, Rational, DistributionHash> value;
  for (const Distribution& xi : xi0) value.emplace(xi, f(xi));
  PseudoConcavityVerdict verdict;
  for (size_t i = 0; i < xi0.size(); ++i) {
    for (size_t j = i + 1; j < xi0.size(); ++j) {
      const Distribution& a = xi0[i];
      const Distribution& b = xi0[j];
      const Rational floor = std::min(value[a], value[b]);
      bool found = false;
      for (int c = 0; c < a.num_schools() && !found; ++c) {
        for (int t = 0; t < a.num_types() && !found; ++t) {
          if (a.at(c, t) <= b.at(c, t)) continue;
          for (int c2 = 0; c2 < a.num_schools() && !found; ++c2) {
            for (int t2 = 0; t2 < a.num_types() && !found; ++t2) {
              if (a.at(c2, t2) >= b.at(c2, t2)) continue;
              auto left = value.find(a.Exchanged(c, t, c2, t2));
              if (left == value.end() || left->second < floor) continue;
              auto right = value.find(b.Exchanged(c2, t2, c, t));
              if (right == value.end() || right->second < floor) continue;
              found = true;
            }
          }
        }
      }
      if (!found) {
        verdict.holds = false;
        verdict.witness = std::make_pair(a, b);
        return verdict;
      }
    }
  }
  return verdict;
}

std::vector<Distribution> UpperContour(const PolicyFunction& f,
                                       const Rational& lambda,
                                       const Problem& p, int64_t bound) {
  std::vector<Distribution> out;
  for (Distribution& xi : EnumerateXi0(p, bound)) {
    if (f(xi) >= lambda) out.push_back(std::move(xi));
  }
  return out;
}

LegitimacyNetwork BuildLegitimacyNetwork(const Problem& p,
                                         const SchoolTypeBounds& ceilings) {
  const int num_d = p.num_districts();
  const int num_c = p.num_schools();
  const int num_t = p.num_types();
  // source, sink, districts, schools, school-type pairs, types
  const int source = 0;
  const int sink = 1;
  auto district_node = [&](int d) { return 2 + d; };
  auto school_node = [&](int c) { return 2 + num_d + c; };
  auto pair_node = [&](int c, int t) { return 2 + num_d + num_c + c * num_t + t; };
  auto type_node = [&](int t) { return 2 + num_d + num_c + num_c * num_t + t; };

  LegitimacyNetwork out;
  out.network = FlowNetwork(2 + num_d + num_c + num_c * num_t + num_t);
  out.network.SetSupply(source, p.num_students());
  out.network.SetSupply(sink, -p.num_students());
  for (int d = 0; d < num_d; ++d) {
    out.network.AddArc(source, district_node(d), p.district_size(d),
                       p.district_size(d), 0);
  }
  for (int c = 0; c < num_c; ++c) {
    out.network.AddArc(district_node(p.school_district(c)), school_node(c), 0,
                       p.capacity(c), 0);
  }
  out.school_type_arcs.assign(static_cast<size_t>(num_c) * num_t, -1);
  for (int c = 0; c < num_c; ++c) {
    for (int t = 0; t < num_t; ++t) {
      auto it = ceilings.find({c, t});
      int64_t upper = it == ceilings.end() ? p.capacity(c) : it->second;
      out.network.AddArc(school_node(c), pair_node(c, t), 0, upper, 0);
      out.school_type_arcs[c * num_t + t] =
          out.network.AddArc(pair_node(c, t), type_node(t), 0, kUnboundedArc, 0);
    }
  }
  for (int t = 0; t < num_t; ++t) {
    out.network.AddArc(type_node(t), sink, p.type_size(t), p.type_size(t), 0);
  }
  return out;
}

std::map<std::pair<int, int>, ImpliedBound> ImpliedBounds(
    const Problem& p, const SchoolTypeBounds& ceilings) {
  LegitimacyNetwork base = BuildLegitimacyNetwork(p, ceilings);
  std::map<std::pair<int, int>, ImpliedBound> out;
  for (int d = 0; d < p.num_districts(); ++d) {
    for (int t = 0; t < p.num_types(); ++t) {
      ImpliedBound bound;
      for (int sign : {1, -1}) {
        FlowNetwork network = base.network;
        for (int c : p.schools_in(d)) {
          network.SetCost(base.school_type_arcs[c * p.num_types() + t], sign);
        }
        FlowSolution solution = SolveMinCostFlow(network);
        if (!solution.feasible) {
          throw Error(ErrorCode::kInfeasibleConstraints,
                      "no legitimate distribution satisfies the district "
                      "totals, type totals, capacities and ceilings");
        }
        int value = static_cast<int>(sign * solution.cost);
        if (sign == 1) {
          bound.floor = value;
        } else {
          bound.ceiling = value;
        }
      }
      out[{d, t}] = bound;
    }
  }
  return out;
}

DiversityCondition CheckDiversityCondition(const Problem& p,
                                           const SchoolTypeBounds& ceilings,
                                           const Rational& alpha) {
  auto bounds = ImpliedBounds(p, ceilings);
  DiversityCondition out;
  bool first = true;
  for (int t = 0; t < p.num_types(); ++t) {
    for (int d = 0; d < p.num_districts(); ++d) {
      for (int e = 0; e < p.num_districts(); ++e) {
        if (d == e || p.district_size(d) == 0 || p.district_size(e) == 0) {
          continue;
        }
        Rational delta = Rational(bounds[{d, t}].ceiling, p.district_size(d)) -
                         Rational(bounds[{e, t}].floor, p.district_size(e));
        out.deltas.push_back({t, d, e, delta});
        if (first || delta > out.max_delta) out.max_delta = delta;
        first = false;
      }
    }
  }
  out.satisfied = out.max_delta <= alpha;
  return out;
}

std::vector<Distribution> LegitimateDistributions(
    const Problem& p, const SchoolTypeBounds& ceilings, int64_t bound) {
  std::vector<Distribution> out;
  for (Distribution& xi : EnumerateXi0(p, bound)) {
    bool ok = true;
    for (int d = 0; d < p.num_districts() && ok; ++d) {
      ok = xi.DistrictTotal(p, d) == p.district_size(d);
    }
    for (int t = 0; t < p.num_types() && ok; ++t) {
      int total = 0;
      for (int c = 0; c < p.num_schools(); ++c) total += xi.at(c, t);
      ok = total == p.type_size(t);
    }
    for (const auto& [key, value] : ceilings) {
      if (ok) ok = xi.at(key.first, key.second) <= value;
    }
    if (ok) out.push_back(std::move(xi));
  }
  return out;
}

}  // namespace interdistrict
