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

// One PASS/FAIL line per acceptance criterion, with the time it took. Exit
// status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <climits>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "interdistrict/cli.h"
#include "interdistrict/oracle.h"
#include "interdistrict/policy.h"
#include "interdistrict/spda.h"
#include "interdistrict/ttc.h"
#include "test_fixtures.h"

namespace interdistrict {
namespace {

using testing::LoadFixture;
using testing::Set;

// Collects the first failed expectation of a criterion.
class Check {
 public:
  void Expect(bool ok, const std::string& what) {
    if (!ok && failure_.empty()) failure_ = what;
  }
  bool passed() const { return failure_.empty(); }
  const std::string& failure() const { return failure_; }

 private:
  std::string failure_;
};

int Pair(const Problem& p, const char* c, const char* t) {
  return testing::SchoolIndex(p, c) * p.num_types() + testing::TypeIndex(p, t);
}

int S(const Problem& p, const char* id) { return testing::StudentIndex(p, id); }

bool WeaklyBetterForAll(const Matching& a, const Matching& b, const Problem& p) {
  std::vector<int> sa = AssignmentOf(a, p), sb = AssignmentOf(b, p);
  for (int s = 0; s < p.num_students(); ++s) {
    if (p.Prefers(s, sb[s], sa[s])) return false;
  }
  return true;
}

int RunCliQuiet(const std::vector<std::string>& args, std::string* out) {
  std::ostringstream o, e;
  int status = RunCli(args, o, e);
  *out = o.str();
  return status;
}

void GoldenSpdaExample1(Check& check) {
  Instance inst = LoadFixture("example1.json");
  const Problem& p = inst.problem;
  SpdaTrace trace = RunSpda(p, MakeProfile(p, inst.rules));
  check.Expect(trace.outcome ==
                   Set(p, {{"s1", "c2"}, {"s2", "c3"}, {"s3", "c1"}, {"s4", "c2"}}),
               "outcome " + ToString(p, trace.outcome));
  check.Expect(trace.steps.size() == 2, "trace length");
  check.Expect(!trace.steps.empty() &&
                   trace.steps[0].tentative ==
                       Set(p, {{"s2", "c3"}, {"s3", "c1"}, {"s4", "c2"}}),
               "step-1 tentative set");
  std::string out;
  int status = RunCliQuiet({"run", testing::FixturePath("example1.json"), "spda"}, &out);
  check.Expect(status == kExitOk &&
                   out.starts_with("student,school,district\ns1,c2,d1\ns2,c3,d2\n"
                                   "s3,c1,d1\ns4,c2,d1\n"),
               "cli run output");
}

void GoldenSpdaVariants(Check& check) {
  Instance respecting = LoadFixture("example1_respecting.json");
  const Problem& p = respecting.problem;
  Matching x = RunSpda(p, MakeProfile(p, respecting.rules)).outcome;
  check.Expect(x == Set(p, {{"s1", "c1"}, {"s2", "c3"}, {"s3", "c2"}, {"s4", "c2"}}),
               "respecting outcome " + ToString(p, x));
  check.Expect(CheckIndividualRationality(x, p).holds, "respecting IR");

  Instance rationed = LoadFixture("example1_rationed.json");
  const Problem& q = rationed.problem;
  Matching y = RunSpda(q, MakeProfile(q, rationed.rules)).outcome;
  check.Expect(y == Set(q, {{"s1", "c2"}, {"s2", "c3"}, {"s3", "c1"}, {"s4", "c3"}}),
               "rationed outcome " + ToString(q, y));
  check.Expect(CheckBalancedExchange(y, q).holds, "rationed balance");
}

void GoldenBounds(Check& check) {
  Instance inst = LoadFixture("appendixC.json");
  const Problem& p = inst.problem;
  const SchoolTypeBounds& ceilings = inst.policy->ceilings;
  auto bounds = ImpliedBounds(p, ceilings);
  const int floors[] = {1, 2, 2, 0};
  const int tops[] = {2, 3, 3, 1};
  int i = 0;
  for (int d = 0; d < 2; ++d) {
    for (int t = 0; t < 2; ++t, ++i) {
      check.Expect(bounds.at({d, t}).floor == floors[i], "floor " + std::to_string(i));
      check.Expect(bounds.at({d, t}).ceiling == tops[i], "ceiling " + std::to_string(i));
    }
  }
  DiversityCondition condition = CheckDiversityCondition(p, ceilings, Rational(3, 4));
  std::vector<Rational> deltas;
  for (const auto& entry : condition.deltas) deltas.push_back(entry.delta);
  check.Expect(deltas == std::vector<Rational>{Rational(-1, 6), Rational(3, 4),
                                               Rational(3, 4), Rational(-1, 6)},
               "deltas");
  check.Expect(condition.max_delta == Rational(3, 4) && condition.satisfied,
               "diversity condition at 3/4");

  std::vector<Distribution> legit = LegitimateDistributions(p, ceilings);
  check.Expect(!legit.empty(), "legitimate distributions");
  for (const auto& [key, bound] : bounds) {
    int lo = INT_MAX, hi = INT_MIN;
    for (const Distribution& xi : legit) {
      lo = std::min(lo, xi.DistrictCount(p, key.first, key.second));
      hi = std::max(hi, xi.DistrictCount(p, key.first, key.second));
    }
    check.Expect(bound.floor == lo && bound.ceiling == hi, "flow vs enumeration");
  }
}

void GoldenSpdaReservesFixture(Check& check) {
  Instance inst = LoadFixture("appendixC.json");
  const Problem& p = inst.problem;
  Matching x = RunSpda(p, MakeProfile(p, inst.rules)).outcome;
  check.Expect(x == Set(p, {{"s1", "c2"}, {"s2", "c3"}, {"s3", "c2"}, {"s4", "c1"},
                            {"s5", "c1"}, {"s6", "c4"}, {"s7", "c3"}}),
               "outcome " + ToString(p, x));
  check.Expect(AlphaDiversityGap(x, p, 0) == Rational(1, 6), "gap t1");
  check.Expect(AlphaDiversityGap(x, p, 1) == Rational(1, 6), "gap t2");
}

void GoldenTtcExample5(Check& check) {
  Instance inst = LoadFixture("example5.json");
  const Problem& p = inst.problem;
  TtcTrace trace = RunTtc(p, *inst.policy, inst.master);
  check.Expect(trace.outcome == Set(p, {{"s1", "c3"}, {"s2", "c1"}, {"s3", "c4"},
                                        {"s4", "c2"}, {"s5", "c1"}, {"s6", "c3"},
                                        {"s7", "c2"}}),
               "outcome " + ToString(p, trace.outcome));
  check.Expect(trace.steps.size() == 5, "step count");
  if (trace.steps.size() < 2) return;
  const std::vector<TtcCycle>& first = trace.steps[0].cycles;
  check.Expect(first.size() == 1 &&
                   first[0].students == std::vector<int>{S(p, "s3"), S(p, "s7")} &&
                   first[0].pairs == std::vector<int>{Pair(p, "c4", "t1"),
                                                      Pair(p, "c2", "t2")},
               "step-1 cycle");
  const std::vector<TtcCycle>& second = trace.steps[1].cycles;
  check.Expect(second.size() == 1 &&
                   second[0].students == std::vector<int>{S(p, "s4")} &&
                   second[0].pairs == std::vector<int>{Pair(p, "c2", "t1")},
               "step-2 cycle");
}

void MConvexVerdicts(Check& check) {
  Instance ex3 = LoadFixture("example3.json");
  const Problem& p = ex3.problem;
  std::vector<Distribution> goal = GoalWithinXi0(*ex3.policy, p);
  check.Expect(!IsMConvex(goal).holds, "example 3 goal is M-convex");
  // s4 of type t1 sits at c3 in one efficient matching and not the other.
  Distribution xi = DistributionOf(Set(p, {{"s1", "c6"}, {"s2", "c2"}, {"s3", "c4"},
                                           {"s4", "c3"}, {"s5", "c5"}, {"s6", "c1"}}),
                                   p);
  Distribution xi_tilde =
      DistributionOf(Set(p, {{"s1", "c1"}, {"s2", "c6"}, {"s3", "c5"}, {"s4", "c4"},
                             {"s5", "c3"}, {"s6", "c2"}}),
                     p);
  const int c3 = testing::SchoolIndex(p, "c3"), t1 = testing::TypeIndex(p, "t1");
  check.Expect(xi.at(c3, t1) > xi_tilde.at(c3, t1), "(c3,t1) is a surplus coordinate");
  DistributionSet members(goal.begin(), goal.end());
  check.Expect(members.contains(xi) && members.contains(xi_tilde), "pair in goal");
  check.Expect(!ExchangeSucceeds(members, xi, xi_tilde, c3, t1),
               "exchange at (c3,t1) succeeds");

  for (const char* name : {"example1.json", "example1_respecting.json",
                           "example1_rationed.json", "example3.json",
                           "example3_stuck.json", "example5.json", "appendixC.json",
                           "thm9prime.json"}) {
    Instance inst = LoadFixture(name);
    const Problem& q = inst.problem;
    Distribution initial = DistributionOf(InitialMatching(q), q);
    SchoolTypeBounds ceilings, floors;
    if (inst.policy && !inst.policy->ceilings.empty()) {
      ceilings = inst.policy->ceilings;
    } else {
      for (int c = 0; c < q.num_schools(); ++c) {
        ceilings[{c, 0}] = std::max(initial.at(c, 0), q.capacity(c) - 1);
      }
    }
    for (int c = 0; c < q.num_schools(); ++c) {
      for (int t = 0; t < q.num_types(); ++t) {
        if (initial.at(c, t) > 0) floors[{c, t}] = 1;
      }
    }
    PolicyGoal balanced;
    balanced.form = PolicyGoal::Form::kBalancedExchange;
    PolicyGoal diversity;
    diversity.form = PolicyGoal::Form::kSchoolDiversity;
    diversity.ceilings = ceilings;
    diversity.floors = floors;
    PolicyGoal combination = diversity;
    combination.form = PolicyGoal::Form::kCombination;
    for (const PolicyGoal* g : {&balanced, &diversity, &combination}) {
      check.Expect(IsMConvex(GoalWithinXi0(*g, q)).holds,
                   std::string(name) + " " + std::string(PolicyFormName(g->form)));
    }
  }
}

void ImpossibilityReplay(Check& check) {
  Instance inst = LoadFixture("example3.json");
  const Problem& p = inst.problem;
  ImpossibilityCertificate cert = ReplayExample3Impossibility(p, *inst.policy);
  auto first_choice = [&](const Deviation& d) {
    return d.misreport.empty() ? std::string() : p.school_id(d.misreport.front());
  };
  const Deviation* s3 = nullptr;
  const Deviation* s6 = nullptr;
  for (const Deviation* d : {&cert.against_x, &cert.against_x_prime}) {
    if (d->student == S(p, "s3")) s3 = d;
    if (d->student == S(p, "s6")) s6 = d;
  }
  check.Expect(s3 != nullptr && first_choice(*s3) == "c5", "s3 misreports c5 first");
  check.Expect(s6 != nullptr && first_choice(*s6) == "c1", "s6 misreports c1 first");
  if (s3 == nullptr || s6 == nullptr) return;
  std::vector<int> honest = AssignmentOf(s3->against, p);
  std::vector<int> deviant = AssignmentOf(s3->result, p);
  check.Expect(p.Prefers(s3->student, deviant[s3->student], honest[s3->student]),
               "s3 gains");
  honest = AssignmentOf(s6->against, p);
  deviant = AssignmentOf(s6->result, p);
  check.Expect(p.Prefers(s6->student, deviant[s6->student], honest[s6->student]),
               "s6 gains");
}

void NonexistenceSearch(Check& check) {
  Problem p = LoadFixture("thm9prime.json").problem;
  NonexistenceInstance canonical{.district = 0, .district_ceilings = {{0, 1}, {1, 1}}};
  SearchResult unsat = SearchRuleNonexistence(p, canonical);
  check.Expect(unsat.status == SearchResult::Status::kUnsatisfiable, "canonical status");
  NonexistenceInstance relaxed{.district = 0, .district_ceilings = {{0, 2}, {1, 2}}};
  SearchResult sat = SearchRuleNonexistence(p, relaxed);
  check.Expect(sat.status == SearchResult::Status::kSatisfiable && sat.witness,
               "relaxed status");
  if (!sat.witness) return;
  AdmissionsRule rule(p, *sat.witness);
  for (RuleProperty prop :
       {RuleProperty::kDistrictCeilings, RuleProperty::kDWeaklyAcceptant,
        RuleProperty::kWeaklySubstitutable, RuleProperty::kIrc}) {
    check.Expect(CheckProperty(rule, prop, p).holds,
                 "witness fails " + std::string(RulePropertyName(prop)));
  }
}

const RuleKind kRuleKinds[] = {
    RuleKind::kSequentialResponsive, RuleKind::kInitialRespecting,
    RuleKind::kRationedSequential, RuleKind::kReservesAndCeilings};

void PropertySuite(Check& check) {
  constexpr int kInstances = 200;
  std::mt19937 rng(2026);
  for (int i = 0; i < kInstances && check.passed(); ++i) {
    const std::string at = "instance " + std::to_string(i) + ": ";
    Problem p = testing::RandomProblem(rng);
    std::vector<RuleSpec> specs = testing::RandomRules(p, kRuleKinds[i % 4], rng);
    RuleProfile rules = MakeProfile(p, specs);
    std::vector<RuleSpec> completion_specs;
    for (const RuleSpec& spec : specs) completion_specs.push_back(CompletionOf(spec));
    RuleProfile completions = MakeProfile(p, completion_specs);

    // (a) stable, and optimal among matchings stable under the completions.
    Matching x = RunSpda(p, rules).outcome;
    check.Expect(CheckStability(x, p, rules).holds, at + "unstable");
    std::vector<Matching> stable = EnumerateStableMatchings(p, completions);
    check.Expect(std::find(stable.begin(), stable.end(), x) != stable.end(),
                 at + "not stable under completions");
    for (const Matching& y : stable) {
      check.Expect(WeaklyBetterForAll(x, y, p), at + "not student-optimal");
    }

    // (b)
    MechanismContext spda{.rules = &rules};
    AuditReport audit = AuditStrategyProofness(MechanismId::kSpda, p, spda, {});
    check.Expect(audit.exhaustive && audit.findings.empty(), at + "spda audit");

    // (c)
    RuleProfile respecting =
        MakeProfile(p, testing::RandomRules(p, RuleKind::kInitialRespecting, rng));
    check.Expect(CheckIndividualRationality(RunSpda(p, respecting).outcome, p).holds,
                 at + "respecting rules not IR");
    RuleProfile rationed =
        MakeProfile(p, testing::RandomRules(p, RuleKind::kRationedSequential, rng));
    check.Expect(CheckBalancedExchange(RunSpda(p, rationed).outcome, p).holds,
                 at + "rationed rules not balanced");

    // (d)
    PolicyGoal goal;
    goal.intersect_xi0 = true;
    if (i % 2 == 0) {
      goal.form = PolicyGoal::Form::kBalancedExchange;
    } else {
      goal.form = PolicyGoal::Form::kSchoolDiversity;
      Distribution initial = DistributionOf(InitialMatching(p), p);
      for (int c = 0; c < p.num_schools(); ++c) {
        for (int t = 0; t < p.num_types(); ++t) {
          goal.ceilings[{c, t}] = initial.at(c, t) + static_cast<int>(rng() % 2);
          goal.floors[{c, t}] = std::max(0, initial.at(c, t) - static_cast<int>(rng() % 2));
        }
      }
    }
    std::vector<int> master = testing::RandomPermutation(p.num_students(), rng);
    Matching z = RunTtc(p, goal, master).outcome;
    check.Expect(GoalContains(goal, DistributionOf(z, p), p), at + "ttc goal");
    check.Expect(CheckIndividualRationality(z, p).holds, at + "ttc IR");
    std::vector<Matching> efficient = ConstrainedEfficientIrMatchings(p, goal);
    check.Expect(std::find(efficient.begin(), efficient.end(), z) != efficient.end(),
                 at + "ttc not constrained efficient");
    MechanismContext ttc{.goal = &goal, .master = master};
    AuditReport ttc_audit = AuditStrategyProofness(MechanismId::kTtc, p, ttc, {});
    check.Expect(ttc_audit.exhaustive && ttc_audit.findings.empty(), at + "ttc audit");

    // (e)
    std::vector<Distribution> xi0 = EnumerateXi0(p);
    std::vector<Distribution> subset;
    for (const Distribution& xi : xi0) {
      if (rng() % 2 == 0) subset.push_back(xi);
    }
    std::vector<PolicyFunction> functions = {
        PolicyFunction::ManhattanIdeal(p, xi0[rng() % xi0.size()]),
        IndicatorOf(GoalWithinXi0(goal, p), p), IndicatorOf(subset, p)};
    for (const PolicyFunction& f : functions) {
      std::set<Rational> levels;
      for (const Distribution& xi : xi0) levels.insert(f(xi));
      bool contours = true;
      for (const Rational& lambda : levels) {
        contours = contours && IsMConvex(UpperContour(f, lambda, p)).holds;
      }
      check.Expect(IsPseudoMConcave(f, p).holds == contours, at + "contour round trip");
    }
    std::vector<Distribution> goal_set = GoalWithinXi0(goal, p);
    check.Expect(IsPseudoMConcave(IndicatorOf(goal_set, p), p).holds &&
                     UpperContour(IndicatorOf(goal_set, p), Rational(1), p) == goal_set,
                 at + "indicator round trip");

    // (f)
    std::vector<RuleSpec> favoring =
        testing::RandomRules(p, RuleKind::kSequentialResponsive, rng);
    for (RuleSpec& spec : favoring) spec = FavoringOwnStudents(spec);
    RuleProfile own = MakeProfile(p, favoring);
    check.Expect(WeaklyBetterForAll(RunSpda(p, own).outcome,
                                    RunIntradistrictSpda(p, own), p),
                 at + "welfare dominance");
  }
}

struct Criterion {
  int number;
  const char* name;
  std::function<void(Check&)> run;
};

}  // namespace
}  // namespace interdistrict

int main() {
  using interdistrict::Check;
  using interdistrict::Criterion;
  const std::vector<Criterion> criteria = {
      {1, "golden SPDA, example 1", interdistrict::GoldenSpdaExample1},
      {2, "golden SPDA variants", interdistrict::GoldenSpdaVariants},
      {3, "implied bounds, appendixC.json", interdistrict::GoldenBounds},
      {4, "golden SPDA, appendixC.json", interdistrict::GoldenSpdaReservesFixture},
      {5, "golden TTC, example 5", interdistrict::GoldenTtcExample5},
      {6, "M-convexity verdicts", interdistrict::MConvexVerdicts},
      {7, "impossibility replay", interdistrict::ImpossibilityReplay},
      {8, "rule nonexistence search", interdistrict::NonexistenceSearch},
      {9, "randomized property suite", interdistrict::PropertySuite},
  };
  int failures = 0;
  for (const Criterion& criterion : criteria) {
    Check check;
    auto start = std::chrono::steady_clock::now();
    try {
      criterion.run(check);
    } catch (const std::exception& e) {
      check.Expect(false, std::string("exception: ") + e.what());
    }
    double ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
    std::printf("%s %d %s (%.0f ms)%s%s\n", check.passed() ? "PASS" : "FAIL",
                criterion.number, criterion.name, ms,
                check.passed() ? "" : ": ", check.failure().c_str());
    if (!check.passed()) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
