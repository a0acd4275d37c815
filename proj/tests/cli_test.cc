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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "test_fixtures.h"

namespace interdistrict {
namespace {

using testing::FixturePath;

struct CliResult {
  int status = 0;
  std::string out;
  std::string err;
};

CliResult Cli(std::vector<std::string> args) {
  for (std::string& arg : args) {
    if (arg.ends_with(".json") && arg.find('/') == std::string::npos) {
      arg = FixturePath(arg);
    }
  }
  std::ostringstream out, err;
  int status = RunCli(args, out, err);
  return {status, out.str(), err.str()};
}

bool Contains(const std::string& text, const std::string& piece) {
  return text.find(piece) != std::string::npos;
}

std::filesystem::path TempFile(const std::string& name) {
  return std::filesystem::temp_directory_path() /
         ("interdistrict_cli_test_" + std::to_string(::getpid()) + "_" + name);
}

TEST(CliTest, RunSpdaExample1) {
  CliResult r = Cli({"run", "example1.json", "spda"});
  EXPECT_EQ(r.status, kExitOk);
  EXPECT_TRUE(r.out.starts_with(
      "student,school,district\ns1,c2,d1\ns2,c3,d2\ns3,c1,d1\ns4,c2,d1\n"));
  EXPECT_TRUE(Contains(r.out, "# individual_rationality: fails (s1)"));
  EXPECT_TRUE(Contains(r.out, "# goal balanced_exchange: fails"));
}

TEST(CliTest, RunTtcExample5) {
  CliResult r = Cli({"run", "example5.json", "ttc"});
  EXPECT_EQ(r.status, kExitOk);
  EXPECT_TRUE(Contains(r.out, "s3,c4,d2\n"));
  EXPECT_TRUE(Contains(r.out, "# individual_rationality: holds"));
  EXPECT_TRUE(Contains(r.out, "# balanced_exchange: holds"));
}

TEST(CliTest, RunIntradistrict) {
  CliResult r = Cli({"run", "example1.json", "spda-intra"});
  EXPECT_EQ(r.status, kExitOk);
  EXPECT_TRUE(Contains(r.out, "s3,c3,d2\ns4,c3,d2\n"));
}

TEST(CliTest, StuckTtcIsMechanismError) {
  CliResult r = Cli({"run", "example3_stuck.json", "ttc"});
  EXPECT_EQ(r.status, kExitMechanism);
  EXPECT_TRUE(Contains(r.err, "Stuck"));
}

TEST(CliTest, UnknownMechanismIsUsage) {
  EXPECT_EQ(Cli({"run", "example1.json", "lottery"}).status, kExitValidation);
  EXPECT_EQ(Cli({"frobnicate"}).status, kExitValidation);
  EXPECT_EQ(Cli({}).status, kExitValidation);
}

TEST(CliTest, MalformedInstance) {
  std::filesystem::path path = TempFile("bad.json");
  std::ofstream(path) << "{bad";
  CliResult r = Cli({"run", path.string(), "spda"});
  EXPECT_EQ(r.status, kExitValidation);
  EXPECT_TRUE(Contains(r.err, "$: malformed JSON at byte 2"));
  std::filesystem::remove(path);
  EXPECT_EQ(Cli({"run", "/nonexistent/x.json", "spda"}).status, kExitValidation);
}

TEST(CliTest, InvalidMarketListsIssues) {
  std::filesystem::path path = TempFile("cap0.json");
  auto doc = nlohmann::ordered_json::parse(
      std::ifstream(FixturePath("example1.json")));
  doc["schools"][0]["capacity"] = 0;
  std::ofstream(path) << doc.dump();
  CliResult r = Cli({"run", path.string(), "spda"});
  EXPECT_EQ(r.status, kExitValidation);
  EXPECT_TRUE(Contains(r.err, "CapacityShortfall"));
  std::filesystem::remove(path);
}

TEST(CliTest, CheckRule) {
  CliResult fails = Cli({"check-rule", "example1.json", "d1", "feasible",
                         "respects-initial"});
  EXPECT_EQ(fails.status, kExitPropertyFails);
  EXPECT_TRUE(Contains(fails.out, "feasible: Holds"));
  EXPECT_TRUE(Contains(fails.out,
                       "respects-initial: Fails: X={(s1,c1),(s3,c1)} "
                       "Ch(X)={(s3,c1)} x=(s1,c1)"));
  EXPECT_EQ(Cli({"check-rule", "example1_respecting.json", "d1",
                 "respects-initial"}).status,
            kExitOk);
  EXPECT_EQ(Cli({"check-rule", "example1.json", "d1"}).status, kExitValidation);
  EXPECT_EQ(Cli({"check-rule", "example1.json", "d1", "pretty"}).status,
            kExitValidation);
  EXPECT_EQ(Cli({"check-rule", "example1.json", "d9", "feasible"}).status,
            kExitValidation);
}

TEST(CliTest, CheckRuleThreadsDoNotChangeWitness) {
  CliResult one = Cli({"check-rule", "example1.json", "d1", "substitutable"});
  CliResult four = Cli({"check-rule", "example1.json", "d1", "substitutable",
                        "--threads", "4"});
  EXPECT_EQ(one.out, four.out);
}

TEST(CliTest, Bounds) {
  CliResult ok = Cli({"bounds", "appendixC.json", "--alpha", "3/4"});
  EXPECT_EQ(ok.status, kExitOk);
  EXPECT_TRUE(Contains(ok.out, "d1,t1,1,2\nd1,t2,2,3\nd2,t1,2,3\nd2,t2,0,1\n"));
  EXPECT_TRUE(Contains(ok.out, "# max_delta: 3/4"));
  EXPECT_EQ(Cli({"bounds", "appendixC.json", "--alpha", "1/6"}).status,
            kExitDiversityFails);
  EXPECT_EQ(Cli({"bounds", "appendixC.json", "--alpha", "three"}).status,
            kExitValidation);
  // Uses the instance's own alpha.
  EXPECT_EQ(Cli({"bounds", "appendixC.json"}).status, kExitOk);
}

TEST(CliTest, BoundsInfeasibleCeilings) {
  std::filesystem::path path = TempFile("tight.json");
  auto doc = nlohmann::ordered_json::parse(
      std::ifstream(FixturePath("appendixC.json")));
  for (auto& [school, row] : doc["policy"]["ceilings"].items()) {
    for (auto& [type, value] : row.items()) value = 0;
  }
  std::ofstream(path) << doc.dump();
  EXPECT_EQ(Cli({"bounds", path.string()}).status, kExitMechanism);
  std::filesystem::remove(path);
}

TEST(CliTest, Audit) {
  CliResult clean = Cli({"audit", "example1.json", "spda"});
  EXPECT_EQ(clean.status, kExitOk);
  EXPECT_TRUE(Contains(clean.out, "runs: 24\nexhaustive: yes\n"));
  CliResult manipulable = Cli({"audit", "example3.json", "efficient-selector"});
  EXPECT_EQ(manipulable.status, kExitAuditFinding);
  EXPECT_TRUE(Contains(manipulable.out, "finding: s"));
  CliResult budget = Cli({"audit", "example1.json", "spda", "--budget", "0"});
  EXPECT_EQ(budget.status, kExitMechanism);
  EXPECT_TRUE(Contains(budget.out, "exhaustive: no"));
  EXPECT_TRUE(Contains(budget.err, "BudgetExceeded"));
}

TEST(CliTest, PolicyCheck) {
  CliResult bad = Cli({"policy-check", "example3.json"});
  EXPECT_EQ(bad.status, kExitPropertyFails);
  EXPECT_TRUE(Contains(bad.out, "xi0: 729\n"));
  EXPECT_TRUE(Contains(bad.out, "m-convex: fails"));
  EXPECT_TRUE(Contains(bad.out, "# warning"));
  CliResult good = Cli({"policy-check", "example5.json"});
  EXPECT_EQ(good.status, kExitOk);
  EXPECT_TRUE(Contains(good.out, "m-convex: holds"));
}

TEST(CliTest, Nonexistence) {
  CliResult r = Cli({"nonexistence", "thm9prime.json"});
  EXPECT_EQ(r.status, kExitOk);
  EXPECT_TRUE(Contains(r.out, "status: unsatisfiable\n"));
  EXPECT_TRUE(Contains(r.out, "domain sets: 256\n"));
  CliResult plain = Cli({"nonexistence", "thm9prime.json", "--no-symmetry"});
  EXPECT_TRUE(Contains(plain.out, "status: unsatisfiable\n"));
  EXPECT_EQ(Cli({"nonexistence", "thm9prime.json", "--budget", "2"}).status,
            kExitMechanism);
}

TEST(CliTest, OutputIsDeterministic) {
  for (std::vector<std::string> args :
       {std::vector<std::string>{"run", "example5.json", "ttc"},
        std::vector<std::string>{"audit", "example3.json", "efficient-selector"},
        std::vector<std::string>{"policy-check", "example3.json"}}) {
    EXPECT_EQ(Cli(args).out, Cli(args).out);
  }
}

TEST(CliTest, TraceFile) {
  std::filesystem::path path = TempFile("trace.json");
  EXPECT_EQ(Cli({"run", "example1.json", "spda", "--trace", path.string()}).status,
            kExitOk);
  auto trace = nlohmann::ordered_json::parse(std::ifstream(path));
  EXPECT_EQ(trace["mechanism"], "spda");
  EXPECT_EQ(trace["steps"].size(), 2u);
  EXPECT_EQ(trace["steps"][0]["proposals"]["d2"][0][0], "s2");
  std::filesystem::remove(path);

  EXPECT_EQ(Cli({"run", "example5.json", "ttc", "--trace", path.string()}).status,
            kExitOk);
  auto ttc = nlohmann::ordered_json::parse(std::ifstream(path));
  EXPECT_EQ(ttc["steps"].size(), 5u);
  std::filesystem::remove(path);
}

TEST(CliTest, BinaryExitStatus) {
  std::string command = std::string(CLI_BINARY) + " run " +
                        FixturePath("example3_stuck.json") + " ttc >/dev/null 2>&1";
  int raw = std::system(command.c_str());
  ASSERT_TRUE(WIFEXITED(raw));
  EXPECT_EQ(WEXITSTATUS(raw), kExitMechanism);
}

}  // namespace
}  // namespace interdistrict
