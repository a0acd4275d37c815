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

#include "interdistrict/cli.h"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "interdistrict/instance_io.h"
#include "interdistrict/oracle.h"
#include "interdistrict/policy.h"
#include "interdistrict/rules.h"
#include "interdistrict/spda.h"
#include "interdistrict/ttc.h"

namespace interdistrict {

namespace {

using Json = nlohmann::ordered_json;

struct Options {
  std::string instance;
  std::string mechanism;
  std::string trace_path;
  std::string master;
  std::string alpha;
  std::string district;
  std::vector<std::string> properties;
  int64_t budget = -1;
  int threads = 1;
  bool no_symmetry = false;
};

std::vector<std::string> SplitIds(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> MasterList(const Instance& inst, const Options& opts) {
  if (opts.master.empty()) return inst.master;
  std::vector<int> master;
  for (const std::string& id : SplitIds(opts.master)) {
    auto s = inst.problem.FindStudent(id);
    if (!s) throw Error(ErrorCode::kUsage, "--master: unknown student " + id);
    master.push_back(*s);
  }
  return master;
}

int District(const Instance& inst, const std::string& id) {
  auto d = inst.problem.FindDistrict(id);
  if (!d) throw Error(ErrorCode::kUsage, "unknown district " + id);
  return *d;
}

const PolicyGoal& Goal(const Instance& inst) {
  if (!inst.policy) {
    throw Error(ErrorCode::kUsage, "the instance has no policy goal");
  }
  return *inst.policy;
}

Json ContractsJson(const Problem& p, const ContractSet& set) {
  Json out = Json::array();
  for (const Contract& x : set) {
    out.push_back({p.student_id(x.student), p.school_id(x.school)});
  }
  return out;
}

void WriteTrace(const std::string& path, const Json& trace) {
  if (path.empty()) return;
  std::ofstream file(path);
  if (!file) throw Error(ErrorCode::kUsage, path + ": cannot write trace");
  file << trace.dump(2) << "\n";
}

Json SpdaTraceJson(const Problem& p, const SpdaTrace& trace) {
  Json steps = Json::array();
  for (const SpdaStep& step : trace.steps) {
    Json proposals = Json::object();
    for (size_t d = 0; d < step.proposals.size(); ++d) {
      proposals[p.district_id(static_cast<int>(d))] =
          ContractsJson(p, step.proposals[d]);
    }
    steps.push_back({{"proposals", proposals},
                     {"tentative", ContractsJson(p, step.tentative)},
                     {"rejected", ContractsJson(p, step.rejected)}});
  }
  return {{"mechanism", "spda"},
          {"steps", steps},
          {"outcome", ContractsJson(p, trace.outcome)}};
}

Json TtcTraceJson(const Problem& p, const TtcTrace& trace) {
  const int num_t = p.num_types();
  auto pair = [&](int q) { return PairName(p, num_t, q); };
  Json steps = Json::array();
  for (const TtcStep& step : trace.steps) {
    Json active = Json::array();
    for (int q : step.active_pairs) active.push_back(pair(q));
    Json pair_points = Json::object();
    for (const auto& [q, s] : step.pair_points) {
      pair_points[pair(q)] = p.student_id(s);
    }
    Json student_points = Json::object();
    for (const auto& [s, q] : step.student_points) {
      student_points[p.student_id(s)] = pair(q);
    }
    Json cycles = Json::array();
    for (const TtcCycle& cycle : step.cycles) {
      Json nodes = Json::array();
      for (size_t i = 0; i < cycle.students.size(); ++i) {
        nodes.push_back(p.student_id(cycle.students[i]));
        nodes.push_back(pair(cycle.pairs[i]));
      }
      cycles.push_back(nodes);
    }
    Json removed = Json::array();
    for (int q : step.removed_pairs) removed.push_back(pair(q));
    steps.push_back({{"active_pairs", active},
                     {"pair_points", pair_points},
                     {"student_points", student_points},
                     {"cycles", cycles},
                     {"removed_pairs", removed}});
  }
  return {{"mechanism", "ttc"},
          {"steps", steps},
          {"outcome", ContractsJson(p, trace.outcome)}};
}

void PrintMatching(const Problem& p, const Matching& x, std::ostream& out) {
  out << "student,school,district\n";
  std::vector<int> school_of = AssignmentOf(x, p);
  for (int s = 0; s < p.num_students(); ++s) {
    out << p.student_id(s) << ",";
    if (school_of[s] >= 0) {
      out << p.school_id(school_of[s]) << ","
          << p.district_id(p.school_district(school_of[s]));
    } else {
      out << ",";
    }
    out << "\n";
  }
}

void PrintVerdicts(const Instance& inst, const Matching& x, std::ostream& out) {
  const Problem& p = inst.problem;
  Verdict ir = CheckIndividualRationality(x, p);
  out << "# individual_rationality: " << (ir.holds ? "holds" : "fails");
  if (!ir.holds) out << " (" << ir.witness << ")";
  out << "\n";
  Verdict balanced = CheckBalancedExchange(x, p);
  out << "# balanced_exchange: " << (balanced.holds ? "holds" : "fails");
  if (!balanced.holds) out << " (" << balanced.witness << ")";
  out << "\n";
  for (int t = 0; t < p.num_types(); ++t) {
    out << "# alpha_gap " << p.type_id(t) << ": "
        << FormatRational(AlphaDiversityGap(x, p, t)) << "\n";
  }
  if (inst.policy) {
    bool in = CheckFeasibility(x, p).feasible() &&
              GoalContains(*inst.policy, DistributionOf(x, p), p);
    out << "# goal " << PolicyFormName(inst.policy->form) << ": "
        << (in ? "holds" : "fails") << "\n";
  }
}

int CmdRun(const Options& opts, std::ostream& out, std::ostream& err) {
  const Instance inst = LoadInstance(opts.instance);
  const Problem& p = inst.problem;
  const std::string mech = opts.mechanism.empty() ? "spda" : opts.mechanism;
  Matching outcome;
  if (mech == "spda") {
    RuleProfile rules = MakeProfile(p, inst.rules);
    try {
      SpdaTrace trace = RunSpda(p, rules);
      WriteTrace(opts.trace_path, SpdaTraceJson(p, trace));
      outcome = trace.outcome;
    } catch (const RuleViolation& e) {
      WriteTrace(opts.trace_path, SpdaTraceJson(p, e.trace()));
      err << "RuleViolation: " << e.what() << "\n";
      return kExitMechanism;
    }
  } else if (mech == "spda-intra") {
    outcome = RunIntradistrictSpda(p, MakeProfile(p, inst.rules));
  } else if (mech == "ttc") {
    try {
      TtcTrace trace = RunTtc(p, Goal(inst), MasterList(inst, opts));
      WriteTrace(opts.trace_path, TtcTraceJson(p, trace));
      outcome = trace.outcome;
    } catch (const TtcStuck& e) {
      WriteTrace(opts.trace_path, TtcTraceJson(p, e.trace()));
      err << "Stuck: " << e.what() << "\n";
      return kExitMechanism;
    }
  } else {
    throw Error(ErrorCode::kUsage, "unknown mechanism " + mech);
  }
  PrintMatching(p, outcome, out);
  PrintVerdicts(inst, outcome, out);
  return kExitOk;
}

int CmdCheckRule(const Options& opts, std::ostream& out) {
  if (opts.properties.empty()) {
    throw Error(ErrorCode::kUsage, "check-rule needs at least one property");
  }
  const Instance inst = LoadInstance(opts.instance);
  const Problem& p = inst.problem;
  const int d = District(inst, opts.district);
  auto spec = std::find_if(inst.rules.begin(), inst.rules.end(),
                           [&](const RuleSpec& r) { return r.district == d; });
  if (spec == inst.rules.end()) {
    throw Error(ErrorCode::kUsage, "no rule for district " + opts.district);
  }
  AdmissionsRule rule(p, *spec);
  RuleSpec base_spec = *spec;
  base_spec.completion = false;
  AdmissionsRule base(p, base_spec);
  CheckOptions check;
  check.threads = opts.threads;
  check.reference = &base;
  int status = kExitOk;
  for (const std::string& name : opts.properties) {
    auto prop = ParseRuleProperty(name);
    if (!prop) throw Error(ErrorCode::kUsage, "unknown property " + name);
    PropertyVerdict verdict = CheckProperty(rule, *prop, p, check);
    out << name << ": " << ToString(p, verdict) << "\n";
    if (!verdict.holds) status = kExitPropertyFails;
  }
  return status;
}

int CmdBounds(const Options& opts, std::ostream& out) {
  const Instance inst = LoadInstance(opts.instance);
  const Problem& p = inst.problem;
  const PolicyGoal& goal = Goal(inst);
  if (goal.ceilings.empty()) {
    throw Error(ErrorCode::kUsage, "the policy has no school-type ceilings");
  }
  std::optional<Rational> alpha = inst.alpha;
  if (!opts.alpha.empty()) alpha = ParseRational(opts.alpha);
  auto bounds = ImpliedBounds(p, goal.ceilings);
  out << "district,type,floor,ceiling\n";
  for (const auto& [key, bound] : bounds) {
    out << p.district_id(key.first) << "," << p.type_id(key.second) << ","
        << bound.floor << "," << bound.ceiling << "\n";
  }
  DiversityCondition cond =
      CheckDiversityCondition(p, goal.ceilings, alpha.value_or(Rational(0)));
  out << "type,district,other,delta\n";
  for (const auto& e : cond.deltas) {
    out << p.type_id(e.type) << "," << p.district_id(e.district) << ","
        << p.district_id(e.other) << "," << FormatRational(e.delta) << "\n";
  }
  out << "# max_delta: " << FormatRational(cond.max_delta) << "\n";
  if (!alpha) return kExitOk;
  out << "# alpha: " << FormatRational(*alpha) << "\n";
  out << "# condition: " << (cond.satisfied ? "holds" : "fails") << "\n";
  return cond.satisfied ? kExitOk : kExitDiversityFails;
}

std::string Ranking(const Problem& p, const std::vector<int>& order) {
  std::string text;
  for (int c : order) {
    if (!text.empty()) text += ">";
    text += p.school_id(c);
  }
  return text;
}

int CmdAudit(const Options& opts, std::ostream& out, std::ostream& err) {
  const Instance inst = LoadInstance(opts.instance);
  const Problem& p = inst.problem;
  const std::string name = opts.mechanism.empty() ? "spda" : opts.mechanism;
  auto id = ParseMechanism(name);
  if (!id) throw Error(ErrorCode::kUsage, "unknown mechanism " + name);
  std::optional<RuleProfile> rules;
  MechanismContext context;
  if (*id == MechanismId::kSpda || *id == MechanismId::kSpdaIntra) {
    rules = MakeProfile(p, inst.rules);
    context.rules = &*rules;
  } else {
    context.goal = &Goal(inst);
    context.master = MasterList(inst, opts);
  }
  AuditConfig config;
  if (opts.budget >= 0) config.budget = opts.budget;
  AuditReport report = AuditStrategyProofness(*id, p, context, config);
  out << "mechanism: " << report.mechanism << "\n";
  out << "instance: " << inst.name << "\n";
  out << "runs: " << report.runs << "\n";
  out << "exhaustive: " << (report.exhaustive ? "yes" : "no") << "\n";
  bool finding = !report.findings.empty();
  for (const AuditFinding& f : report.findings) {
    std::vector<int> honest = AssignmentOf(f.honest, p);
    std::vector<int> deviant = AssignmentOf(f.deviant, p);
    auto school = [&](int c) { return c < 0 ? std::string("-") : p.school_id(c); };
    out << "finding: " << p.student_id(f.student) << " reports "
        << Ranking(p, f.misreport) << " instead of "
        << Ranking(p, f.true_report) << " and gets "
        << school(deviant[f.student]) << " instead of "
        << school(honest[f.student]) << "\n";
  }
  if (report.budget_exceeded) {
    err << "BudgetExceeded: stopped after " << report.runs << " runs\n";
    return kExitMechanism;
  }
  // Cross-check the truthful outcome against the oracle.
  Matching outcome = RunMechanism(*id, p, context);
  if (*id == MechanismId::kSpda) {
    std::vector<Matching> stable = EnumerateStableMatchings(p, *rules);
    bool member = std::find(stable.begin(), stable.end(), outcome) != stable.end();
    out << "oracle stable: " << (member ? "yes" : "no") << "\n";
    if (!member) finding = true;
  } else if (*id == MechanismId::kTtc ||
             *id == MechanismId::kEfficientSelector) {
    std::vector<Matching> efficient =
        ConstrainedEfficientIrMatchings(p, *context.goal);
    bool member =
        std::find(efficient.begin(), efficient.end(), outcome) != efficient.end();
    out << "oracle constrained efficient: " << (member ? "yes" : "no") << "\n";
    if (!member) finding = true;
  }
  return finding ? kExitAuditFinding : kExitOk;
}

int CmdPolicyCheck(const Options& opts, std::ostream& out) {
  const Instance inst = LoadInstance(opts.instance);
  const Problem& p = inst.problem;
  const PolicyGoal& goal = Goal(inst);
  std::vector<Distribution> xi0 = EnumerateXi0(p);
  std::vector<Distribution> within = GoalWithinXi0(goal, p);
  Distribution initial = DistributionOf(InitialMatching(p), p);
  out << "form: " << PolicyFormName(goal.form) << "\n";
  if (goal.warning()) {
    out << "# warning: this form is not expected to be M-convex\n";
  }
  out << "xi0: " << xi0.size() << "\n";
  out << "goal within xi0: " << within.size() << "\n";
  out << "initial in goal: "
      << (GoalContains(goal, initial, p) ? "yes" : "no") << "\n";
  int status = kExitOk;
  MConvexVerdict convex = IsMConvex(within);
  out << "m-convex: " << (convex.holds ? "holds" : "fails") << "\n";
  if (convex.witness) {
    const MConvexWitness& w = *convex.witness;
    out << "  xi: " << DistributionJson(p, w.xi) << "\n";
    out << "  xi_tilde: " << DistributionJson(p, w.xi_tilde) << "\n";
    out << "  coordinate: (" << p.school_id(w.school) << ","
        << p.type_id(w.type) << ")\n";
    status = kExitPropertyFails;
  }
  if (goal.function) {
    PseudoConcavityVerdict concave = IsPseudoMConcave(*goal.function, p);
    out << "pseudo m-concave: " << (concave.holds ? "holds" : "fails") << "\n";
    if (concave.witness) {
      out << "  xi: " << DistributionJson(p, concave.witness->first) << "\n";
      out << "  xi_tilde: " << DistributionJson(p, concave.witness->second)
          << "\n";
      status = kExitPropertyFails;
    }
  }
  return status;
}

int CmdNonexistence(const Options& opts, std::ostream& out) {
  const Instance inst = LoadInstance(opts.instance);
  const Problem& p = inst.problem;
  const PolicyGoal& goal = Goal(inst);
  NonexistenceInstance search;
  search.district = opts.district.empty() ? 0 : District(inst, opts.district);
  for (const auto& [key, q] : goal.district_ceilings) {
    if (key.first == search.district) search.district_ceilings[key.second] = q;
  }
  SearchOptions options;
  options.symmetry = !opts.no_symmetry;
  if (opts.budget >= 0) options.node_budget = opts.budget;
  SearchResult result = SearchRuleNonexistence(p, search, options);
  const bool sat = result.status == SearchResult::Status::kSatisfiable;
  out << "district: " << p.district_id(search.district) << "\n";
  out << "status: " << (sat ? "satisfiable" : "unsatisfiable") << "\n";
  out << "domain sets: " << result.domain_sets << "\n";
  out << "nodes: " << result.nodes << "\n";
  for (const std::string& line : result.refutation) out << line << "\n";
  if (!sat) return kExitOk;
  AdmissionsRule rule(p, *result.witness);
  int status = kExitOk;
  for (RuleProperty prop :
       {RuleProperty::kDistrictCeilings, RuleProperty::kDWeaklyAcceptant,
        RuleProperty::kIrc, RuleProperty::kWeaklySubstitutable}) {
    PropertyVerdict verdict = CheckProperty(rule, prop, p);
    out << "witness " << RulePropertyName(prop) << ": "
        << ToString(p, verdict) << "\n";
    if (!verdict.holds) status = kExitPropertyFails;
  }
  return status;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Interdistrict school choice: mechanisms, policy checks and "
               "audits"};
  app.require_subcommand(1);
  Options opts;

  auto add_instance = [&](CLI::App* cmd) {
    cmd->add_option("instance", opts.instance, "Instance JSON file")
        ->required();
  };
  CLI::App* run = app.add_subcommand("run", "Run a mechanism");
  add_instance(run);
  run->add_option("mechanism,--mechanism", opts.mechanism,
                  "spda, spda-intra or ttc");
  run->add_option("--trace", opts.trace_path, "Write the step trace as JSON");
  run->add_option("--master", opts.master, "Comma-separated student ids");

  CLI::App* check = app.add_subcommand("check-rule", "Check rule properties");
  add_instance(check);
  check->add_option("district", opts.district, "District id")->required();
  check->add_option("properties,--property", opts.properties,
                    "Properties to check");
  check->add_option("--threads", opts.threads, "Worker threads")
      ->check(CLI::PositiveNumber);

  CLI::App* bounds = app.add_subcommand("bounds", "Implied district bounds");
  add_instance(bounds);
  bounds->add_option("--alpha", opts.alpha, "Diversity threshold p/q");

  CLI::App* audit = app.add_subcommand("audit", "Manipulation audit");
  add_instance(audit);
  audit->add_option("mechanism,--mechanism", opts.mechanism,
                    "spda, spda-intra, ttc or efficient-selector");
  audit->add_option("--budget", opts.budget, "Mechanism runs allowed");
  audit->add_option("--master", opts.master, "Comma-separated student ids");

  CLI::App* policy = app.add_subcommand("policy-check", "Inspect the goal");
  add_instance(policy);

  CLI::App* nonexist =
      app.add_subcommand("nonexistence", "Search for a ceiling-respecting rule");
  add_instance(nonexist);
  nonexist->add_option("--district", opts.district, "District id");
  nonexist->add_option("--budget", opts.budget, "Search node budget");
  nonexist->add_flag("--no-symmetry", opts.no_symmetry,
                     "Disable symmetry pruning");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (run->parsed()) return CmdRun(opts, out, err);
    if (check->parsed()) return CmdCheckRule(opts, out);
    if (bounds->parsed()) return CmdBounds(opts, out);
    if (audit->parsed()) return CmdAudit(opts, out, err);
    if (policy->parsed()) return CmdPolicyCheck(opts, out);
    if (nonexist->parsed()) return CmdNonexistence(opts, out);
  } catch (const ValidationError& e) {
    err << "ValidationError: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    err << ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::kValidation:
      case ErrorCode::kUsage:
      case ErrorCode::kUnknownContract:
      case ErrorCode::kNotInDomain:
        return kExitValidation;
      default:
        return kExitMechanism;
    }
  }
  return kExitValidation;
}

}  // namespace interdistrict
