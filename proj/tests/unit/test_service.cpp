#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include <json.hpp>

#include "../support/files.hpp"
#include "../support/live_server.hpp"
#include "scengen/parser.hpp"
#include "scengen/service.hpp"

using namespace scengen;
using nlohmann::json;

namespace {

GameService::DefinitionMap definitions() {
  GameService::DefinitionMap defs;
  for (const char* name : {"hospital", "biogarden"}) {
    const ScenarioDoc doc = *parse(testsupport::read_source(std::string("scenarios/") + name + ".scn")).doc;
    defs.emplace(name, std::make_shared<const GameDefinition>(compile(doc)));
  }
  return defs;
}

json body(const HttpReply& r) { return json::parse(r.body); }

std::vector<ScriptStep> hospital_golden() {
  return parse_script(testsupport::read_source("scenarios/hospital_golden.script"));
}

json action_body(const ScriptStep& s) {
  json j{{"action", s.action}};
  if (s.target) j["target"] = *s.target;
  return j;
}

}  // namespace

TEST(Service, CreateSession) {
  GameService svc(definitions());
  const HttpReply r = svc.create_session(R"({"definition_id": "hospital", "seed": 7})");
  ASSERT_EQ(r.status, 201);
  const json v = body(r);
  EXPECT_FALSE(v["session_id"].get<std::string>().empty());
  EXPECT_EQ(v["status"], "running");
  EXPECT_EQ(v["state"]["name"], "Start");
  EXPECT_EQ(v["score"], 0);
  EXPECT_EQ(v["health"], 100);
  EXPECT_EQ(v["turn"], 0);
  EXPECT_EQ(v["menu"].size(), 2u);
}

TEST(Service, CreateErrors) {
  GameService svc(definitions());
  EXPECT_EQ(svc.create_session(R"({"definition_id": "nope"})").status, 404);
  EXPECT_EQ(svc.create_session("not json").status, 400);
  EXPECT_EQ(svc.create_session(R"({"seed": 1})").status, 400);
  EXPECT_EQ(svc.create_session(R"({"definition_id": 5})").status, 400);
}

TEST(Service, SameSeedSameViewDistinctIds) {
  GameService svc(definitions());
  json a = body(svc.create_session(R"({"definition_id": "hospital", "seed": 7})"));
  json b = body(svc.create_session(R"({"definition_id": "hospital", "seed": 7})"));
  EXPECT_NE(a["session_id"], b["session_id"]);
  a.erase("session_id");
  b.erase("session_id");
  EXPECT_EQ(a, b);
}

TEST(Service, GoldenPathThenConflict) {
  GameService svc(definitions());
  const std::string id = body(svc.create_session(R"({"definition_id": "hospital"})"))["session_id"];
  json v;
  for (const auto& step : hospital_golden()) {
    const HttpReply r = svc.apply_action(id, action_body(step).dump());
    ASSERT_EQ(r.status, 200);
    v = body(r);
    EXPECT_TRUE(v["step"]["accepted"].get<bool>());
  }
  EXPECT_EQ(v["status"], "won");
  EXPECT_EQ(v["score"], 75);
  EXPECT_TRUE(v["menu"].empty());
  EXPECT_EQ(svc.apply_action(id, R"({"action": "admit_patient"})").status, 409);
  EXPECT_EQ(svc.get_actions(id).status, 409);
  EXPECT_EQ(svc.get_session(id).status, 200);
}

TEST(Service, FeedbackIsMostRecentFirst) {
  GameService svc(definitions());
  const std::string id = body(svc.create_session(R"({"definition_id": "hospital"})"))["session_id"];
  svc.apply_action(id, R"({"action": "skip_protection", "target": "door"})");
  const json v = body(svc.apply_action(id, R"({"action": "wear_gloves", "target": "gloves_box"})"));
  ASSERT_EQ(v["feedback"].size(), 2u);
  EXPECT_EQ(v["feedback"][0], "Good. Gloves first.");
  EXPECT_EQ(v["health"], 80);
}

TEST(Service, RejectedActionStillTakesATurn) {
  GameService svc(definitions());
  const std::string id = body(svc.create_session(R"({"definition_id": "hospital"})"))["session_id"];
  const json v = body(svc.apply_action(id, R"({"action": "fly"})"));
  EXPECT_FALSE(v["step"]["accepted"].get<bool>());
  EXPECT_EQ(v["turn"], 1);
  EXPECT_EQ(v["state"]["name"], "Start");
  EXPECT_EQ(svc.apply_action(id, R"({"target": "x"})").status, 400);
}

TEST(Service, UnknownAndDeletedSessions) {
  GameService svc(definitions());
  EXPECT_EQ(svc.get_session("missing").status, 404);
  EXPECT_EQ(svc.apply_action("missing", R"({"action": "x"})").status, 404);
  const std::string id = body(svc.create_session(R"({"definition_id": "hospital"})"))["session_id"];
  EXPECT_EQ(svc.delete_session(id).status, 204);
  EXPECT_EQ(svc.get_session(id).status, 404);
  EXPECT_EQ(svc.delete_session(id).status, 404);
}

TEST(Service, IdleSessionsExpire) {
  auto now = std::chrono::steady_clock::time_point{};
  ServiceOptions opts;
  opts.ttl = std::chrono::seconds(3600);
  opts.clock = [&now] { return now; };
  GameService svc(definitions(), opts);
  const std::string a = body(svc.create_session(R"({"definition_id": "hospital"})"))["session_id"];
  const std::string b = body(svc.create_session(R"({"definition_id": "hospital"})"))["session_id"];
  now += std::chrono::seconds(3000);
  EXPECT_EQ(svc.get_session(a).status, 200);  // touching a renews it
  now += std::chrono::seconds(1000);
  EXPECT_EQ(svc.evict_expired(), 1u);
  EXPECT_EQ(svc.get_session(b).status, 404);
  EXPECT_EQ(svc.get_session(a).status, 200);
  now += std::chrono::seconds(3601);
  EXPECT_EQ(svc.get_session(a).status, 404);
  EXPECT_EQ(svc.session_count(), 0u);
}

TEST(Service, ListDefinitions) {
  GameService svc(definitions());
  const json v = body(svc.list_definitions());
  ASSERT_EQ(v["definitions"].size(), 2u);
  EXPECT_EQ(v["definitions"][0]["id"], "biogarden");
  EXPECT_EQ(svc.get_definition("hospital").status, 200);
  EXPECT_EQ(svc.get_definition("x").status, 404);
}

TEST(Service, ViewIsPureFunctionOfSession) {
  GameService svc(definitions());
  const std::string id = body(svc.create_session(R"({"definition_id": "biogarden"})"))["session_id"];
  svc.apply_action(id, R"({"action": "survey_perimeter"})");
  EXPECT_EQ(svc.get_session(id).body, svc.get_session(id).body);
}

TEST(ServiceHttp, GoldenPathOverHttp) {
  GameService svc(definitions());
  testsupport::LiveServer server(svc);
  auto cli = server.client();
  auto created = cli.Post("/api/sessions", R"({"definition_id": "hospital", "seed": 7})", "application/json");
  ASSERT_TRUE(created);
  ASSERT_EQ(created->status, 201);
  EXPECT_EQ(created->get_header_value("Access-Control-Allow-Origin"), "*");
  EXPECT_EQ(created->get_header_value("Content-Type"), "application/json");
  const std::string id = json::parse(created->body)["session_id"];
  auto actions = cli.Get("/api/sessions/" + id + "/actions");
  ASSERT_TRUE(actions);
  EXPECT_EQ(json::parse(actions->body)["menu"].size(), 2u);
  json v;
  for (const auto& step : hospital_golden()) {
    auto r = cli.Post("/api/sessions/" + id + "/actions", action_body(step).dump(), "application/json");
    ASSERT_TRUE(r);
    ASSERT_EQ(r->status, 200);
    v = json::parse(r->body);
  }
  EXPECT_EQ(v["status"], "won");
  EXPECT_EQ(v["score"], 75);
  auto again = cli.Post("/api/sessions/" + id + "/actions", R"({"action": "admit_patient"})", "application/json");
  ASSERT_TRUE(again);
  EXPECT_EQ(again->status, 409);
  auto defs = cli.Get("/api/definitions");
  ASSERT_TRUE(defs);
  EXPECT_EQ(defs->status, 200);
  auto preflight = cli.Options("/api/sessions");
  ASSERT_TRUE(preflight);
  EXPECT_EQ(preflight->status, 204);
  auto del = cli.Delete("/api/sessions/" + id);
  ASSERT_TRUE(del);
  EXPECT_EQ(del->status, 204);
  auto gone = cli.Get("/api/sessions/" + id);
  ASSERT_TRUE(gone);
  EXPECT_EQ(gone->status, 404);
}

TEST(ServiceHttp, ParallelHammerAndIsolation) {
  GameService svc(definitions());
  testsupport::LiveServer server(svc);
  const std::string a = body(svc.create_session(R"({"definition_id": "hospital"})"))["session_id"];
  const std::string b = body(svc.create_session(R"({"definition_id": "hospital"})"))["session_id"];
  const GameSession b_before = *svc.snapshot(b);

  std::atomic<int> ok{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 10; ++t) {
    threads.emplace_back([&] {
      auto cli = server.client();
      for (int i = 0; i < 10; ++i) {
        // Unavailable actions keep the session running while still taking a turn.
        auto r = cli.Post("/api/sessions/" + a + "/actions", R"({"action": "hold"})", "application/json");
        if (r && r->status == 200) ++ok;
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok.load(), 100);
  const GameSession after = *svc.snapshot(a);
  EXPECT_EQ(after.turn, 100u);
  EXPECT_EQ(after.score, 0);
  EXPECT_EQ(after.status, SessionStatus::Running);
  EXPECT_EQ(*svc.snapshot(b), b_before);
}

TEST(ServiceConfig, PortFromEnvironment) {
  unsetenv("SCENGEN_PORT");
  EXPECT_EQ(service_port_from_env(), 8080);
  setenv("SCENGEN_PORT", "9123", 1);
  EXPECT_EQ(service_port_from_env(), 9123);
  setenv("SCENGEN_PORT", "banana", 1);
  EXPECT_EQ(service_port_from_env(), 8080);
  unsetenv("SCENGEN_PORT");
}
