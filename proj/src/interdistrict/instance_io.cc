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

#include "interdistrict/instance_io.h"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace interdistrict {

using Json = nlohmann::ordered_json;

namespace {

[[noreturn]] void Fail(const std::string& locus, const std::string& what) {
  throw Error(ErrorCode::kValidation, locus + ": " + what);
}

const Json& Field(const Json& obj, const std::string& key,
                  const std::string& locus) {
  if (!obj.is_object()) Fail(locus, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) Fail(locus, "missing \"" + key + "\"");
  return *it;
}

const Json* OptionalField(const Json& obj, const std::string& key,
                          const std::string& locus) {
  if (!obj.is_object()) Fail(locus, "expected an object");
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

std::string String(const Json& v, const std::string& locus) {
  if (!v.is_string()) Fail(locus, "expected a string");
  return v.get<std::string>();
}

int Int(const Json& v, const std::string& locus) {
  if (!v.is_number_integer()) Fail(locus, "expected an integer");
  return v.get<int>();
}

bool Bool(const Json& v, const std::string& locus) {
  if (!v.is_boolean()) Fail(locus, "expected true or false");
  return v.get<bool>();
}

const Json& Array(const Json& v, const std::string& locus) {
  if (!v.is_array()) Fail(locus, "expected an array");
  return v;
}

const Json& Object(const Json& v, const std::string& locus) {
  if (!v.is_object()) Fail(locus, "expected an object");
  return v;
}

std::vector<std::string> Strings(const Json& v, const std::string& locus) {
  std::vector<std::string> out;
  Array(v, locus);
  for (size_t i = 0; i < v.size(); ++i) {
    out.push_back(String(v[i], locus + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Rational RationalField(const Json& v, const std::string& locus) {
  if (v.is_number_integer()) return Rational(v.get<int64_t>());
  try {
    return ParseRational(String(v, locus));
  } catch (const Error& e) {
    Fail(locus, e.what());
  }
}

// Id resolution against a validated problem.
class Ids {
 public:
  explicit Ids(const Problem& p) : p_(p) {}

  int Student(const std::string& id, const std::string& locus) const {
    if (auto s = p_.FindStudent(id)) return *s;
    Fail(locus, "unknown student \"" + id + "\"");
  }
  int School(const std::string& id, const std::string& locus) const {
    if (auto c = p_.FindSchool(id)) return *c;
    Fail(locus, "unknown school \"" + id + "\"");
  }
  int District(const std::string& id, const std::string& locus) const {
    if (auto d = p_.FindDistrict(id)) return *d;
    Fail(locus, "unknown district \"" + id + "\"");
  }
  int Type(const std::string& id, const std::string& locus) const {
    if (auto t = p_.FindType(id)) return *t;
    Fail(locus, "unknown type \"" + id + "\"");
  }

  std::vector<int> Students(const Json& v, const std::string& locus) const {
    std::vector<int> out;
    Array(v, locus);
    for (size_t i = 0; i < v.size(); ++i) {
      std::string at = locus + "[" + std::to_string(i) + "]";
      out.push_back(Student(String(v[i], at), at));
    }
    return out;
  }
  std::vector<int> Schools(const Json& v, const std::string& locus) const {
    std::vector<int> out;
    Array(v, locus);
    for (size_t i = 0; i < v.size(); ++i) {
      std::string at = locus + "[" + std::to_string(i) + "]";
      out.push_back(School(String(v[i], at), at));
    }
    return out;
  }
  std::vector<int> Types(const Json& v, const std::string& locus) const {
    std::vector<int> out;
    Array(v, locus);
    for (size_t i = 0; i < v.size(); ++i) {
      std::string at = locus + "[" + std::to_string(i) + "]";
      out.push_back(Type(String(v[i], at), at));
    }
    return out;
  }

  // {school: {type: n}}
  std::map<std::pair<int, int>, int> SchoolTypeMap(
      const Json& v, const std::string& locus) const {
    std::map<std::pair<int, int>, int> out;
    for (const auto& [school, inner] : Object(v, locus).items()) {
      std::string at = locus + "." + school;
      int c = School(school, at);
      for (const auto& [type, n] : Object(inner, at).items()) {
        out[{c, Type(type, at + "." + type)}] = Int(n, at + "." + type);
      }
    }
    return out;
  }

  Distribution DistributionFrom(const Json& v, const std::string& locus) const {
    Distribution xi(p_.num_schools(), p_.num_types());
    for (const auto& [key, n] : SchoolTypeMap(v, locus)) {
      xi.at(key.first, key.second) = n;
    }
    return xi;
  }

  ContractSet Contracts(const Json& v, const std::string& locus) const {
    std::vector<Contract> out;
    Array(v, locus);
    for (size_t i = 0; i < v.size(); ++i) {
      std::string at = locus + "[" + std::to_string(i) + "]";
      const Json& pair = Array(v[i], at);
      if (pair.size() != 2) Fail(at, "expected [student, school]");
      out.push_back(MakeContract(p_, Student(String(pair[0], at), at),
                                 School(String(pair[1], at), at)));
    }
    return Normalize(std::move(out));
  }

 private:
  const Problem& p_;
};

ProblemSpec ParseProblemSpec(const Json& root) {
  ProblemSpec spec;
  spec.types = Strings(Field(root, "types", "$"), "$.types");
  spec.districts = Strings(Field(root, "districts", "$"), "$.districts");
  const Json& schools = Array(Field(root, "schools", "$"), "$.schools");
  for (size_t i = 0; i < schools.size(); ++i) {
    std::string at = "$.schools[" + std::to_string(i) + "]";
    ProblemSpec::School school;
    school.id = String(Field(schools[i], "id", at), at + ".id");
    school.district =
        String(Field(schools[i], "district", at), at + ".district");
    school.capacity =
        Int(Field(schools[i], "capacity", at), at + ".capacity");
    spec.schools.push_back(std::move(school));
  }
  const Json& students = Array(Field(root, "students", "$"), "$.students");
  for (size_t i = 0; i < students.size(); ++i) {
    std::string at = "$.students[" + std::to_string(i) + "]";
    ProblemSpec::Student student;
    student.id = String(Field(students[i], "id", at), at + ".id");
    student.district =
        String(Field(students[i], "district", at), at + ".district");
    student.type = String(Field(students[i], "type", at), at + ".type");
    student.preferences = Strings(Field(students[i], "preferences", at),
                                  at + ".preferences");
    spec.students.push_back(std::move(student));
  }
  const Json& initial =
      Object(Field(root, "initial_matching", "$"), "$.initial_matching");
  for (const auto& [student, school] : initial.items()) {
    spec.initial_matching.emplace_back(
        student, String(school, "$.initial_matching." + student));
  }
  return spec;
}

std::shared_ptr<const ChoiceTable> ParseTable(const Json& v, const Ids& ids,
                                              const std::string& locus) {
  auto table = std::make_shared<ChoiceTable>();
  std::string domain = String(Field(v, "domain", locus), locus + ".domain");
  if (domain == "all") {
    table->domain = ChoiceTable::Domain::kAllSubsets;
  } else if (domain == "feasible") {
    table->domain = ChoiceTable::Domain::kFeasibleSubsets;
  } else {
    Fail(locus + ".domain", "expected \"all\" or \"feasible\"");
  }
  table->universe =
      ids.Contracts(Field(v, "universe", locus), locus + ".universe");
  if (table->universe.size() > 24) Fail(locus, "universe too large");
  auto mask_of = [&](const ContractSet& set, const std::string& at) {
    uint32_t mask = 0;
    for (const Contract& x : set) {
      auto it = std::find(table->universe.begin(), table->universe.end(), x);
      if (it == table->universe.end()) Fail(at, "contract outside universe");
      mask |= uint32_t{1} << (it - table->universe.begin());
    }
    return mask;
  };
  const Json& entries = Array(Field(v, "entries", locus), locus + ".entries");
  for (size_t i = 0; i < entries.size(); ++i) {
    std::string at = locus + ".entries[" + std::to_string(i) + "]";
    uint32_t set = mask_of(ids.Contracts(Field(entries[i], "set", at), at + ".set"),
                           at + ".set");
    uint32_t chosen = mask_of(
        ids.Contracts(Field(entries[i], "chosen", at), at + ".chosen"),
        at + ".chosen");
    table->chosen[set] = chosen;
  }
  return table;
}

RuleSpec ParseRule(const Json& v, const Ids& ids, const std::string& locus) {
  RuleSpec rule;
  rule.district = ids.District(
      String(Field(v, "district", locus), locus + ".district"),
      locus + ".district");
  std::string kind = String(Field(v, "kind", locus), locus + ".kind");
  auto parsed = ParseRuleKind(kind);
  if (!parsed) Fail(locus + ".kind", "unknown rule kind \"" + kind + "\"");
  rule.kind = *parsed;
  if (auto* f = OptionalField(v, "school_order", locus)) {
    rule.school_order = ids.Schools(*f, locus + ".school_order");
  }
  if (auto* f = OptionalField(v, "priorities", locus)) {
    for (const auto& [school, list] : Object(*f, locus + ".priorities").items()) {
      std::string at = locus + ".priorities." + school;
      rule.priorities[ids.School(school, at)] = ids.Students(list, at);
    }
  }
  if (auto* f = OptionalField(v, "master", locus)) {
    rule.master = ids.Students(*f, locus + ".master");
  }
  if (auto* f = OptionalField(v, "reserves", locus)) {
    rule.reserves = ids.SchoolTypeMap(*f, locus + ".reserves");
  }
  if (auto* f = OptionalField(v, "ceilings", locus)) {
    rule.ceilings = ids.SchoolTypeMap(*f, locus + ".ceilings");
  }
  if (auto* f = OptionalField(v, "type_order", locus)) {
    rule.type_order = ids.Types(*f, locus + ".type_order");
  }
  if (auto* f = OptionalField(v, "district_cap", locus)) {
    rule.district_cap = Int(*f, locus + ".district_cap");
  }
  if (auto* f = OptionalField(v, "district_ceilings", locus)) {
    for (const auto& [type, n] :
         Object(*f, locus + ".district_ceilings").items()) {
      std::string at = locus + ".district_ceilings." + type;
      rule.district_ceilings[ids.Type(type, at)] = Int(n, at);
    }
  }
  if (auto* f = OptionalField(v, "favor_own_students", locus)) {
    rule.favor_own_students = Bool(*f, locus + ".favor_own_students");
  }
  if (auto* f = OptionalField(v, "completion", locus)) {
    rule.completion = Bool(*f, locus + ".completion");
  }
  if (auto* f = OptionalField(v, "table", locus)) {
    rule.table = ParseTable(*f, ids, locus + ".table");
  }
  return rule;
}

PolicyFunction ParseFunction(const Json& v, const Problem& p, const Ids& ids,
                             const std::string& locus) {
  std::string kind = String(Field(v, "kind", locus), locus + ".kind");
  if (kind == "manhattan_ideal") {
    return PolicyFunction::ManhattanIdeal(
        p, ids.DistributionFrom(Field(v, "ideal", locus), locus + ".ideal"));
  }
  if (kind == "indicator") {
    std::vector<Distribution> set;
    const Json& list = Array(Field(v, "set", locus), locus + ".set");
    for (size_t i = 0; i < list.size(); ++i) {
      set.push_back(ids.DistributionFrom(
          list[i], locus + ".set[" + std::to_string(i) + "]"));
    }
    return PolicyFunction::Indicator(p, set);
  }
  if (kind == "table") {
    std::map<Distribution, Rational> values;
    const Json& list = Array(Field(v, "entries", locus), locus + ".entries");
    for (size_t i = 0; i < list.size(); ++i) {
      std::string at = locus + ".entries[" + std::to_string(i) + "]";
      values[ids.DistributionFrom(Field(list[i], "xi", at), at + ".xi")] =
          RationalField(Field(list[i], "value", at), at + ".value");
    }
    Rational fallback{0};
    if (auto* f = OptionalField(v, "fallback", locus)) {
      fallback = RationalField(*f, locus + ".fallback");
    }
    return PolicyFunction::Table(std::move(values), fallback);
  }
  Fail(locus + ".kind", "unknown function kind \"" + kind + "\"");
}

PolicyGoal ParsePolicy(const Json& v, const Problem& p, const Ids& ids) {
  const std::string locus = "$.policy";
  PolicyGoal goal;
  std::string form = String(Field(v, "form", locus), locus + ".form");
  auto parsed = ParsePolicyForm(form);
  if (!parsed) Fail(locus + ".form", "unknown policy form \"" + form + "\"");
  goal.form = *parsed;
  if (auto* f = OptionalField(v, "explicit_set", locus)) {
    Array(*f, locus + ".explicit_set");
    for (size_t i = 0; i < f->size(); ++i) {
      goal.explicit_set.push_back(ids.DistributionFrom(
          (*f)[i], locus + ".explicit_set[" + std::to_string(i) + "]"));
    }
  }
  if (auto* f = OptionalField(v, "floors", locus)) {
    goal.floors = ids.SchoolTypeMap(*f, locus + ".floors");
  }
  if (auto* f = OptionalField(v, "ceilings", locus)) {
    goal.ceilings = ids.SchoolTypeMap(*f, locus + ".ceilings");
  }
  if (auto* f = OptionalField(v, "district_ceilings", locus)) {
    for (const auto& [district, inner] :
         Object(*f, locus + ".district_ceilings").items()) {
      std::string at = locus + ".district_ceilings." + district;
      int d = ids.District(district, at);
      for (const auto& [type, n] : Object(inner, at).items()) {
        goal.district_ceilings[{d, ids.Type(type, at + "." + type)}] =
            Int(n, at + "." + type);
      }
    }
  }
  if (auto* f = OptionalField(v, "function", locus)) {
    goal.function = ParseFunction(*f, p, ids, locus + ".function");
  }
  if (auto* f = OptionalField(v, "lambda", locus)) {
    goal.lambda = RationalField(*f, locus + ".lambda");
  }
  if (auto* f = OptionalField(v, "intersect_xi0", locus)) {
    goal.intersect_xi0 = Bool(*f, locus + ".intersect_xi0");
  }
  if (goal.form == PolicyGoal::Form::kFLambda && !goal.function) {
    Fail(locus, "f_lambda needs a function");
  }
  return goal;
}

Json SchoolTypeJson(const Problem& p,
                    const std::map<std::pair<int, int>, int>& values) {
  Json out = Json::object();
  for (const auto& [key, n] : values) {
    out[p.school_id(key.first)][p.type_id(key.second)] = n;
  }
  return out;
}

Json DistributionToJson(const Problem& p, const Distribution& xi) {
  Json out = Json::object();
  for (int c = 0; c < xi.num_schools(); ++c) {
    for (int t = 0; t < xi.num_types(); ++t) {
      if (xi.at(c, t) != 0) out[p.school_id(c)][p.type_id(t)] = xi.at(c, t);
    }
  }
  return out;
}

Json StudentList(const Problem& p, const std::vector<int>& students) {
  Json out = Json::array();
  for (int s : students) out.push_back(p.student_id(s));
  return out;
}

Json ContractsJson(const Problem& p, const ContractSet& set) {
  Json out = Json::array();
  for (const Contract& x : set) {
    out.push_back({p.student_id(x.student), p.school_id(x.school)});
  }
  return out;
}

ContractSet FromMask(const ContractSet& universe, uint32_t mask) {
  ContractSet out;
  for (size_t i = 0; i < universe.size(); ++i) {
    if (mask & (uint32_t{1} << i)) out.push_back(universe[i]);
  }
  return out;
}

Json RuleJson(const Problem& p, const RuleSpec& rule) {
  Json out;
  out["district"] = p.district_id(rule.district);
  out["kind"] = std::string(RuleKindName(rule.kind));
  if (!rule.school_order.empty()) {
    Json order = Json::array();
    for (int c : rule.school_order) order.push_back(p.school_id(c));
    out["school_order"] = order;
  }
  if (!rule.priorities.empty()) {
    Json pri = Json::object();
    for (const auto& [c, list] : rule.priorities) {
      pri[p.school_id(c)] = StudentList(p, list);
    }
    out["priorities"] = pri;
  }
  if (!rule.master.empty()) out["master"] = StudentList(p, rule.master);
  if (!rule.reserves.empty()) out["reserves"] = SchoolTypeJson(p, rule.reserves);
  if (!rule.ceilings.empty()) out["ceilings"] = SchoolTypeJson(p, rule.ceilings);
  if (!rule.type_order.empty()) {
    Json order = Json::array();
    for (int t : rule.type_order) order.push_back(p.type_id(t));
    out["type_order"] = order;
  }
  if (rule.district_cap) out["district_cap"] = *rule.district_cap;
  if (!rule.district_ceilings.empty()) {
    Json ceil = Json::object();
    for (const auto& [t, n] : rule.district_ceilings) ceil[p.type_id(t)] = n;
    out["district_ceilings"] = ceil;
  }
  if (rule.favor_own_students) out["favor_own_students"] = true;
  if (rule.completion) out["completion"] = true;
  if (rule.table) {
    Json table;
    table["domain"] = rule.table->domain == ChoiceTable::Domain::kAllSubsets
                          ? "all"
                          : "feasible";
    table["universe"] = ContractsJson(p, rule.table->universe);
    std::vector<std::pair<uint32_t, uint32_t>> entries(
        rule.table->chosen.begin(), rule.table->chosen.end());
    std::sort(entries.begin(), entries.end());
    Json list = Json::array();
    for (const auto& [set, chosen] : entries) {
      Json entry;
      entry["set"] = ContractsJson(p, FromMask(rule.table->universe, set));
      entry["chosen"] = ContractsJson(p, FromMask(rule.table->universe, chosen));
      list.push_back(entry);
    }
    table["entries"] = list;
    out["table"] = table;
  }
  return out;
}

Json FunctionJson(const Problem& p, const PolicyFunction& f) {
  Json out;
  switch (f.kind()) {
    case PolicyFunction::Kind::kManhattanIdeal:
      out["kind"] = "manhattan_ideal";
      out["ideal"] = DistributionToJson(p, f.ideal());
      break;
    case PolicyFunction::Kind::kIndicator: {
      out["kind"] = "indicator";
      Json set = Json::array();
      for (const Distribution& xi : f.indicator_set()) {
        set.push_back(DistributionToJson(p, xi));
      }
      out["set"] = set;
      break;
    }
    case PolicyFunction::Kind::kTable: {
      out["kind"] = "table";
      Json entries = Json::array();
      for (const auto& [xi, value] : f.table()) {
        Json entry;
        entry["xi"] = DistributionToJson(p, xi);
        entry["value"] = FormatRational(value);
        entries.push_back(entry);
      }
      out["entries"] = entries;
      out["fallback"] = FormatRational(f.fallback());
      break;
    }
  }
  return out;
}

Json PolicyJson(const Problem& p, const PolicyGoal& goal) {
  Json out;
  out["form"] = std::string(PolicyFormName(goal.form));
  if (!goal.explicit_set.empty()) {
    Json set = Json::array();
    for (const Distribution& xi : goal.explicit_set) {
      set.push_back(DistributionToJson(p, xi));
    }
    out["explicit_set"] = set;
  }
  if (!goal.floors.empty()) out["floors"] = SchoolTypeJson(p, goal.floors);
  if (!goal.ceilings.empty()) out["ceilings"] = SchoolTypeJson(p, goal.ceilings);
  if (!goal.district_ceilings.empty()) {
    Json ceil = Json::object();
    for (const auto& [key, n] : goal.district_ceilings) {
      ceil[p.district_id(key.first)][p.type_id(key.second)] = n;
    }
    out["district_ceilings"] = ceil;
  }
  if (goal.function) out["function"] = FunctionJson(p, *goal.function);
  if (goal.form == PolicyGoal::Form::kFLambda) {
    out["lambda"] = FormatRational(goal.lambda);
  }
  if (goal.intersect_xi0) out["intersect_xi0"] = true;
  return out;
}

}  // namespace

Instance ParseInstance(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kValidation,
                "$: malformed JSON at byte " + std::to_string(e.byte));
  }
  Object(root, "$");
  Instance instance;
  if (auto* meta = OptionalField(root, "meta", "$")) {
    if (auto* f = OptionalField(*meta, "name", "$.meta")) {
      instance.name = String(*f, "$.meta.name");
    }
    if (auto* f = OptionalField(*meta, "version", "$.meta")) {
      instance.version = String(*f, "$.meta.version");
    }
  }
  instance.problem = Problem::Validate(ParseProblemSpec(root));
  const Problem& p = instance.problem;
  Ids ids(p);
  if (auto* rules = OptionalField(root, "rules", "$")) {
    Array(*rules, "$.rules");
    for (size_t i = 0; i < rules->size(); ++i) {
      instance.rules.push_back(
          ParseRule((*rules)[i], ids, "$.rules[" + std::to_string(i) + "]"));
    }
  }
  if (auto* policy = OptionalField(root, "policy", "$")) {
    instance.policy = ParsePolicy(*policy, p, ids);
  }
  if (auto* master = OptionalField(root, "master_list", "$")) {
    instance.master = ids.Students(*master, "$.master_list");
  }
  if (auto* alpha = OptionalField(root, "alpha", "$")) {
    instance.alpha = RationalField(*alpha, "$.alpha");
  }
  return instance;
}

Instance LoadInstance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kValidation, path + ": cannot open");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseInstance(buffer.str());
}

std::string SerializeInstance(const Instance& instance) {
  const Problem& p = instance.problem;
  const ProblemSpec spec = p.ToSpec();
  Json root;
  root["meta"] = {{"name", instance.name}, {"version", instance.version}};
  root["types"] = spec.types;
  root["districts"] = spec.districts;
  Json schools = Json::array();
  for (const ProblemSpec::School& c : spec.schools) {
    schools.push_back(
        {{"id", c.id}, {"district", c.district}, {"capacity", c.capacity}});
  }
  root["schools"] = schools;
  Json students = Json::array();
  for (const ProblemSpec::Student& s : spec.students) {
    students.push_back({{"id", s.id},
                        {"district", s.district},
                        {"type", s.type},
                        {"preferences", s.preferences}});
  }
  root["students"] = students;
  Json initial = Json::object();
  for (const auto& [student, school] : spec.initial_matching) {
    initial[student] = school;
  }
  root["initial_matching"] = initial;
  Json rules = Json::array();
  for (const RuleSpec& rule : instance.rules) rules.push_back(RuleJson(p, rule));
  root["rules"] = rules;
  if (instance.policy) root["policy"] = PolicyJson(p, *instance.policy);
  if (!instance.master.empty()) {
    root["master_list"] = StudentList(p, instance.master);
  }
  if (instance.alpha) root["alpha"] = FormatRational(*instance.alpha);
  return root.dump(2) + "\n";
}

std::string DistributionJson(const Problem& p, const Distribution& xi) {
  return DistributionToJson(p, xi).dump();
}

}  // namespace interdistrict
