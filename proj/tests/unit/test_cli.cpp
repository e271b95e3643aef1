#include <gtest/gtest.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "obdm/cli.hpp"
#include "testkit.hpp"

using namespace testkit;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  for (auto& a : args)
    if (a.find(".obdm") != std::string::npos || a.find(".db") != std::string::npos)
      a = std::string(OBDM_FIXTURES) + "/" + a;
  std::ostringstream out, err;
  const int code = obdm::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json run_json(std::vector<std::string> args) {
  args.push_back("--format");
  args.push_back("json");
  const auto r = run(args);
  EXPECT_NE(r.code, 2) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("format_version"), 1);
  EXPECT_EQ(j.at("command"), args.front());
  return j;
}

}  // namespace

TEST(Cli, Validate) {
  const auto r = run({"validate", "university.obdm"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "OK 3 source relations, 8 assertions, 3 mapping rules, 4 queries\n");
}

TEST(Cli, FindCompleteExample2) {
  const auto r = run({"find-complete", "example2.obdm", "--source-query", "qs"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "qg(x) :- Person(x).\n");
  EXPECT_EQ(run({"find-complete", "example2.obdm", "--source-query", "qs", "--name", "best"}).out,
            "best(x) :- Person(x).\n");
  const auto j = run_json({"find-complete", "example2.obdm", "--source-query", "qs"});
  EXPECT_EQ(j.at("rewriting"), "qg(x) :- Person(x).");
  EXPECT_EQ(j.at("form"), "normal");
}

TEST(Cli, CheckCompleteExitCodes) {
  EXPECT_EQ(run({"check-complete", "example2.obdm", "--source-query", "qs", "--onto-query", "person"}).code, 0);
  const auto no = run({"check-complete", "example2.obdm", "--source-query", "qs", "--onto-query", "bottomq"});
  EXPECT_EQ(no.code, 1);
  EXPECT_EQ(no.out, "NOT COMPLETE\n");
  const auto j = run_json({"check-complete", "example2.obdm", "--source-query", "qs", "--onto-query", "person"});
  EXPECT_EQ(j.at("complete"), true);
  EXPECT_TRUE(j.contains("reason"));
}

TEST(Cli, ChaseTraceAndJson) {
  const auto r = run({"chase", "example1.obdm", "--query", "qs", "--trace"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("STEP 1 TGD 1 {", 0), 0u);
  const auto j = run_json({"chase", "university.obdm", "--query", "qs_code"});
  EXPECT_EQ(j.at("bottom"), false);
  ASSERT_EQ(j.at("abox").size(), 3u);
  EXPECT_TRUE(j.at("abox")[0].contains("predicate"));
  EXPECT_TRUE(j.at("abox")[0].contains("args"));
}

TEST(Cli, ChaseWithoutMappingIsEmpty) {
  const auto path = testing::TempDir() + "no_mapping.obdm";
  std::ofstream(path) << "[source]\nr/1.\n[tbox]\n[mapping]\n[query qs]\nqs(x) :- r(x).\n";
  std::ostringstream out, err;
  EXPECT_EQ(obdm::run_cli({"chase", path, "--query", "qs", "--format", "json"}, out, err), 0);
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_TRUE(j.at("abox").empty());
  EXPECT_TRUE(j.at("psi").empty());
  EXPECT_EQ(j.at("bottom"), false);
}

TEST(Cli, CertAndPerfectRef) {
  const auto r = run({"cert", "university.obdm", "--db", "university.db", "--onto-query", "students"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "(ann)\n(bob)\n");
  const auto j = run_json({"cert", "university.obdm", "--db", "university.db", "--onto-query", "students"});
  EXPECT_EQ(j.at("answers"), nlohmann::json::parse(R"([["ann"],["bob"]])"));
  const auto pr = run({"perfect-ref", "university.obdm", "--onto-query", "students"});
  EXPECT_EQ(pr.out, "students(s) :- Student(s).\nstudents(s) :- attends(s,_e0).\n");
}

TEST(Cli, Qsat) {
  const auto r = run({"qsat", "university.obdm"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("qsat0() :- Professor(x), Student(x)."), std::string::npos);
  EXPECT_NE(r.out.find("qsat1() :- teaches(x,y1), teaches(x,y2), y1 != y2."), std::string::npos);
}

TEST(Cli, OracleExample1) {
  const auto cert = run({"oracle", "example1.obdm", "--source-query", "qs", "--onto-query", "qg", "--variant", "sound",
                         "--semantics", "cert", "--budget", "pool=a|b|c"});
  EXPECT_EQ(cert.code, 0);
  EXPECT_EQ(cert.out.rfind("HOLDS sound cert", 0), 0u);
  const auto model = run({"oracle", "example1.obdm", "--source-query", "qs", "--onto-query", "qg", "--variant",
                          "sound", "--semantics", "model", "--db", "example1.db"});
  EXPECT_EQ(model.code, 1);
  EXPECT_NE(model.out.find("G(c,e1)."), std::string::npos);
  const auto j = run_json({"oracle", "example1.obdm", "--source-query", "qs", "--onto-query", "qg", "--variant",
                           "sound", "--semantics", "model", "--db", "example1.db"});
  EXPECT_EQ(j.at("holds"), false);
  EXPECT_EQ(j.at("witness").at("tuple"), nlohmann::json::parse(R"(["e1"])"));
}

TEST(Cli, Errors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"validate", "missing.obdm"}).code, 2);
  EXPECT_EQ(run({"find-complete", "example2.obdm", "--source-query", "nope"}).code, 2);
  EXPECT_EQ(run({"find-complete", "example2.obdm", "--source-query", "person"}).code, 2);
  EXPECT_EQ(run({"validate", "example2.obdm", "--format", "yaml"}).code, 2);
  const auto bad = run({"oracle", "example1.obdm", "--source-query", "qs", "--onto-query", "qg", "--budget", "atoms=0"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_FALSE(bad.err.empty());
}

TEST(Cli, ErrorJsonKeepsFormatVersion) {
  const auto r = run({"validate", "missing.obdm", "--format", "json"});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
}

TEST(CliProperty, OutputIsByteStable) {
  const std::vector<std::vector<std::string>> commands{
      {"validate", "university.obdm"},
      {"chase", "university.obdm", "--query", "qs", "--trace"},
      {"qsat", "university.obdm"},
      {"perfect-ref", "university.obdm", "--onto-query", "takes_coded"},
      {"cert", "university.obdm", "--db", "university.db", "--onto-query", "takes_coded"},
      {"check-complete", "university.obdm", "--source-query", "qs", "--onto-query", "takes_coded"},
      {"find-complete", "university.obdm", "--source-query", "qs_code"},
      {"oracle", "example2.obdm", "--source-query", "qs", "--onto-query", "person", "--variant", "exact"},
  };
  for (auto cmd : commands) {
    for (const std::string format : {"text", "json"}) {
      auto args = cmd;
      args.push_back("--format");
      args.push_back(format);
      const auto a = run(args);
      const auto b = run(args);
      ASSERT_NE(a.code, 2) << cmd.front() << " " << a.err;
      ASSERT_EQ(a.code, b.code);
      ASSERT_EQ(a.out, b.out) << cmd.front();
    }
  }
}
