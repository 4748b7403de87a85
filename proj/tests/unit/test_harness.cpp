#include <gtest/gtest.h>

#include <set>

#include <json.hpp>

#include "../support/files.hpp"
#include "../support/random_docs.hpp"
#include "scengen/harness.hpp"

using namespace scengen;

namespace {

GameDefinition game(const std::string& src) {
  ParseResult r = parse(src);
  if (!r.ok()) throw std::runtime_error(format_error(r.errors.front()));
  return compile_unchecked(*r.doc);
}

GameDefinition reference(const std::string& name) {
  return compile(*parse(testsupport::read_source("scenarios/" + name + ".scn")).doc);
}

const nlohmann::json& frozen() {
  static const nlohmann::json j = nlohmann::json::parse(testsupport::read_source("tests/golden/oracle.json"));
  return j;
}

}  // namespace

TEST(Harness, SelfLoopGivesTwoPaths) {
  const PathSet ps = enumerate_paths(game(R"(scenario "L" {
    role p { player } state Start { entry } state A {} state End { exit }
    transition Start -> A on action(go) by p {}
    transition A -> A on action(slip) by p { score: -1 }
    transition A -> End on action(done) by p {} })"),
                                     1);
  ASSERT_EQ(ps.paths.size(), 2u);
  EXPECT_FALSE(ps.truncated);
  for (const auto& p : ps.paths) EXPECT_EQ(p.status, SessionStatus::Won);
  EXPECT_EQ(ps.paths[0].actions.size(), 2u);  // done < slip
  EXPECT_EQ(ps.paths[1].actions.size(), 3u);
}

TEST(Harness, MinimalGameHasOnePath) {
  const PathSet ps = enumerate_paths(game(R"(scenario "M" {
    role p { player } state S { entry } state E { exit } transition S -> E on action(go) by p {} })"),
                                     1);
  EXPECT_EQ(ps.paths.size(), 1u);
}

TEST(Harness, PathCountIsPowerOfLoops) {
  for (int n = 2; n <= 11; ++n) {
    for (int k = 0; k < n && k <= 10; ++k) {
      const PathSet ps = enumerate_paths(compile_unchecked(testsupport::loop_chain(n, k)), 1);
      EXPECT_EQ(ps.paths.size(), std::size_t{1} << k) << "n=" << n << " k=" << k;
      EXPECT_FALSE(ps.truncated);
    }
  }
}

TEST(Harness, TruncationFlag) {
  const PathSet ps = enumerate_paths(compile_unchecked(testsupport::loop_chain(6, 5)), 1, 10);
  EXPECT_TRUE(ps.truncated);
  EXPECT_EQ(ps.paths.size(), 10u);
}

TEST(Harness, ReferenceScenariosMatchOracle) {
  for (const char* name : {"hospital", "biogarden"}) {
    const GameDefinition def = reference(name);
    const PathSet ps = enumerate_paths(def, 1);
    const auto& want = frozen()[name];
    EXPECT_EQ(ps.paths.size(), want["paths"].get<std::size_t>()) << name;
    EXPECT_EQ(ps.pruned, want["pruned"].get<std::size_t>()) << name;
    std::set<std::string> terminals;
    std::set<std::int64_t> scores;
    std::set<std::vector<ScriptStep>> unique;
    auto shared = std::make_shared<const GameDefinition>(def);
    for (const auto& p : ps.paths) {
      if (p.status == SessionStatus::Won) terminals.insert(def.states[p.terminal_state].name);
      scores.insert(p.final_score);
      EXPECT_TRUE(unique.insert(p.actions).second);
      const Outcome o = run_script(shared, 0, p.actions);
      EXPECT_EQ(o.terminal_state, p.terminal_state);
      EXPECT_EQ(o.final_score, p.final_score);
    }
    EXPECT_EQ(terminals, want["won_terminals"].get<std::set<std::string>>()) << name;
    EXPECT_EQ(scores, want["scores"].get<std::set<std::int64_t>>()) << name;
  }
}

TEST(Harness, CompareRuns) {
  const GameDefinition def = reference("hospital");
  auto steps = parse_script(testsupport::read_source("scenarios/hospital_golden.script"));
  auto wrong = steps;
  wrong.insert(wrong.begin(), {"skip_protection", std::string("door")});
  const CompareReport r = compare_runs(def, {steps, wrong});
  EXPECT_EQ(r.verdict, Verdict::Invariant);
  EXPECT_NE(r.outcomes[0].final_score, r.outcomes[1].final_score);
  EXPECT_EQ(compare_runs(def, {steps}).verdict, Verdict::Invariant);

  const GameDefinition forked = game(R"(scenario "Fork" {
    role p { player } state S { entry } state Good { exit } state Bad { exit }
    transition S -> Good on action(left) by p {}
    transition S -> Bad on action(right) by p {} })");
  const CompareReport v = compare_runs(forked, {{{"left", std::nullopt}}, {{"right", std::nullopt}}});
  EXPECT_EQ(v.verdict, Verdict::Violated);
  EXPECT_EQ(to_string(v.verdict), "violated");
}

TEST(Harness, MeasurePipeline) {
  const std::string src = testsupport::read_source("scenarios/hospital.scn");
  const PipelineMetrics a = measure_pipeline(src);
  const PipelineMetrics b = measure_pipeline(src);
  const ScenarioSummary s = summary(*parse(src).doc);
  EXPECT_EQ(a.states, s.state_count);
  EXPECT_EQ(a.transitions, s.transition_count);
  EXPECT_EQ(a.entities, s.entity_count);
  EXPECT_GT(a.bundle_bytes, 0u);
  EXPECT_EQ(std::tie(a.states, a.transitions, a.entities, a.bundle_bytes),
            std::tie(b.states, b.transitions, b.entities, b.bundle_bytes));
  EXPECT_GE(a.parse_ms, 0);
  EXPECT_GE(a.validate_ms, 0);
  EXPECT_GE(a.compile_ms, 0);

  const PipelineMetrics tiny = measure_pipeline(R"(scenario "T" {
    role p { player } state S { entry } state E { exit } transition S -> E on action(go) by p {} })");
  EXPECT_EQ(tiny.states, 2u);
  EXPECT_GT(tiny.bundle_bytes, 0u);

  EXPECT_THROW(measure_pipeline("scenario {"), PipelineError);
  EXPECT_THROW(measure_pipeline(testsupport::read_source("scenarios/broken.scn")), RejectedScenario);
  EXPECT_NO_THROW(nlohmann::json::parse(metrics_to_json(a)));
}
