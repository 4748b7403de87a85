#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "../support/files.hpp"
#include "scengen/cli.hpp"
#include "scengen/interchange.hpp"
#include "scengen/parser.hpp"

using namespace scengen;
using testsupport::source_path;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = run_cli(args, in, out, err);
  return {code, out.str(), err.str()};
}

class CliFiles : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("scengen_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string tmp(const std::string& name) const { return (dir_ / name).string(); }

  std::filesystem::path dir_;
};

const std::string kGoldenKeys = "2\n2\n1\n1\n1\n";

}  // namespace

TEST(Cli, ValidateReference) {
  const CliRun r = cli({"validate", source_path("scenarios/hospital.scn")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "OK: 0 errors, 0 warnings\n");
  const CliRun b = cli({"validate", source_path("scenarios/biogarden.scn")});
  EXPECT_EQ(b.code, 0);
  EXPECT_EQ(b.out, testsupport::read_source("tests/golden/biogarden_validate.txt"));
}

TEST(Cli, ValidateBroken) {
  const CliRun r = cli({"validate", source_path("scenarios/broken.scn")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("UnreachableState"), std::string::npos);
  const CliRun j = cli({"validate", "--json", source_path("scenarios/broken.scn")});
  EXPECT_EQ(j.code, 1);
  EXPECT_EQ(nlohmann::json::parse(j.out)["errors"], 1);
}

TEST(Cli, ParseErrorsAreDiagnostics) {
  const CliRun r = cli({"validate", source_path("tests/golden/hospital.dot")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("hospital.dot:1:1"), std::string::npos);
}

TEST(Cli, UsageAndIoErrors) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"validate"}).code, 2);
  EXPECT_EQ(cli({"validate", "/nonexistent/x.scn"}).code, 2);
  EXPECT_EQ(cli({"paths", "--max-loops", "many", source_path("scenarios/hospital.scn")}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST_F(CliFiles, GraphMatchesGolden) {
  const CliRun r = cli({"graph", source_path("scenarios/hospital.scn"), "-o", tmp("hospital.dot")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(testsupport::read_text(tmp("hospital.dot")), testsupport::read_source("tests/golden/hospital.dot"));
}

TEST_F(CliFiles, CompileIsByteStable) {
  const std::vector<std::string> base = {"compile", source_path("scenarios/hospital.scn"), "--assets",
                                         source_path("scenarios/hospital_assets.tsv"), "-o"};
  auto a = base, b = base;
  a.push_back(tmp("a.game"));
  b.push_back(tmp("b.game"));
  EXPECT_EQ(cli(a).code, 0);
  EXPECT_EQ(cli(b).code, 0);
  EXPECT_EQ(testsupport::read_text(tmp("a.game")), testsupport::read_text(tmp("b.game")));
  EXPECT_EQ(testsupport::read_text(tmp("a.game")), testsupport::read_source("tests/golden/hospital.game"));
}

TEST(Cli, CompileRefusesBroken) {
  const CliRun r = cli({"compile", source_path("scenarios/broken.scn")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("FAILED"), std::string::npos);
}

TEST(Cli, CompileWarnsOnMissingAssets) {
  const CliRun r = cli({"compile", source_path("scenarios/biogarden.scn"), "--assets",
                     source_path("scenarios/biogarden_assets.tsv")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("fume_hood"), std::string::npos);
}

TEST(Cli, PlayGoldenTranscript) {
  const CliRun r = cli({"play", source_path("tests/golden/hospital.game")}, kGoldenKeys);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, testsupport::read_source("tests/golden/hospital_play.txt"));
  EXPECT_EQ(r.out.substr(r.out.size() - 20), "WON\nFinal score: 75\n");
  // Same keystrokes, same bytes.
  EXPECT_EQ(cli({"play", source_path("tests/golden/hospital.game")}, kGoldenKeys).out, r.out);
}

TEST(Cli, PlayQuit) {
  const CliRun r = cli({"play", source_path("scenarios/hospital.scn")}, "q\n");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("[Turn 0]"), std::string::npos);
  EXPECT_EQ(r.out.find("[Turn 1]"), std::string::npos);
}

TEST(Cli, PlayInvalidChoiceConsumesATurn) {
  const CliRun r = cli({"play", source_path("scenarios/hospital.scn")}, "7\nq\n");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("invalid choice"), std::string::npos);
  EXPECT_NE(r.out.find("[Turn 1] Score: 0"), std::string::npos);
  EXPECT_NE(r.out.find("State: Start", r.out.find("[Turn 1]")), std::string::npos);
}

TEST_F(CliFiles, PlayMalformedBundle) {
  std::ofstream(tmp("bad.game")) << "{\"format\": \"scengen-bundle\", \"version\": \"1.0\"}";
  EXPECT_EQ(cli({"play", tmp("bad.game")}, "1\n").code, 2);
  std::ofstream(tmp("v9.game")) << "{\"format\": \"scengen-bundle\", \"version\": \"9.0\"}";
  const CliRun r = cli({"play", tmp("v9.game")}, "1\n");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("9.0"), std::string::npos);
}

TEST_F(CliFiles, SimulateWritesReplay) {
  const CliRun r = cli({"simulate", source_path("scenarios/biogarden.scn"),
                     source_path("scenarios/biogarden_golden.script"), "-o", tmp("run.replay"), "--json"});
  EXPECT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["status"], "won");
  EXPECT_EQ(j["final_score"], 80);
  EXPECT_NE(testsupport::read_text(tmp("run.replay")).find("GameWon"), std::string::npos);
}

TEST(Cli, SimulateComparesSeveralScripts) {
  const CliRun r = cli({"simulate", source_path("scenarios/hospital.scn"), source_path("scenarios/hospital_golden.script"),
                     source_path("scenarios/hospital_golden.script")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("verdict: invariant"), std::string::npos);
}

TEST(Cli, Paths) {
  const CliRun r = cli({"paths", source_path("scenarios/hospital.scn"), "--max-loops", "1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("paths: 16\n"), std::string::npos);
  EXPECT_NE(r.out.find("linear: yes"), std::string::npos);
  const CliRun j = cli({"paths", source_path("scenarios/biogarden.scn"), "--json"});
  EXPECT_EQ(nlohmann::json::parse(j.out)["count"], 32);
}

TEST(Cli, Metrics) {
  const CliRun r = cli({"metrics", source_path("scenarios/hospital.scn"), "--json"});
  EXPECT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["states"], 6);
  EXPECT_EQ(j["transitions"], 11);
  EXPECT_EQ(cli({"metrics", source_path("scenarios/broken.scn")}).code, 1);
}

TEST_F(CliFiles, InterchangeInput) {
  const ScenarioDoc doc = *parse(testsupport::read_source("scenarios/hospital.scn")).doc;
  std::ofstream(tmp("hospital.json")) << to_interchange(doc);
  const CliRun r = cli({"validate", tmp("hospital.json")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "OK: 0 errors, 0 warnings\n");
  std::ofstream(tmp("bad.json")) << "{\"name\": 3}";
  EXPECT_EQ(cli({"validate", tmp("bad.json")}).code, 1);
}
