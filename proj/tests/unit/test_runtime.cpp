#include <gtest/gtest.h>

#include <random>

#include "../support/files.hpp"
#include "../support/random_docs.hpp"
#include "scengen/parser.hpp"
#include "scengen/runtime.hpp"

using namespace scengen;

namespace {

std::shared_ptr<const GameDefinition> game(const std::string& src) {
  ParseResult r = parse(src);
  if (!r.ok()) throw std::runtime_error(format_error(r.errors.front()));
  return std::make_shared<const GameDefinition>(compile_unchecked(*r.doc));
}

std::shared_ptr<const GameDefinition> reference(const std::string& name) {
  return game(testsupport::read_source("scenarios/" + name + ".scn"));
}

std::vector<ScriptStep> golden(const std::string& name) {
  return parse_script(testsupport::read_source("scenarios/" + name + "_golden.script"));
}

std::vector<EventKind> kinds(const std::vector<EngineEvent>& events) {
  std::vector<EventKind> out;
  for (const auto& e : events) out.push_back(e.kind);
  return out;
}

// Player idles at Start; NPC behaviors are the variable part.
std::string arena(const std::string& npc, const std::string& extra = "") {
  return R"(scenario "Arena" {
  role hero { player health: 100 position: (3, 1) }
  )" + npc + R"(
  entity crate { tag: "crate" position: (5, 5) }
  state Start { entry }
  state End { exit }
  transition Start -> Start on action(wait) by hero {}
  transition Start -> End on action(leave) by hero {}
  )" + extra + "\n}";
}

}  // namespace

TEST(Runtime, StartSession) {
  const auto def = reference("hospital");
  const GameSession s = start_session(def, 42);
  EXPECT_EQ(def->states[s.current_state].name, "Start");
  EXPECT_EQ(s.score, 0);
  EXPECT_EQ(s.player_health(), 100);
  EXPECT_EQ(s.status, SessionStatus::Running);
  EXPECT_EQ(s.turn, 0u);
  EXPECT_EQ(start_session(def, 42), s);
  EXPECT_NE(start_session(def, 43).rng_state, s.rng_state);
}

TEST(Runtime, HospitalMenuAtStart) {
  const auto menu = available_actions(start_session(reference("hospital"), 0));
  ASSERT_EQ(menu.size(), 2u);
  EXPECT_EQ(menu[0].action, "skip_protection");
  EXPECT_EQ(menu[1].action, "wear_gloves");
  EXPECT_EQ(menu[1].label, "Put on gloves");
}

TEST(Runtime, MenuMatchesNaiveFilter) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    auto def = std::make_shared<const GameDefinition>(compile_unchecked(normalize(testsupport::random_doc(rng))));
    for (std::size_t st = 0; st < def->states.size(); ++st) {
      GameSession s = start_session(def, 0);
      s.current_state = st;
      std::vector<std::pair<std::string, std::optional<std::string>>> want;
      for (const auto& t : def->transitions) {
        if (t.from == st && t.actor == def->player_index) want.emplace_back(t.action, t.target);
      }
      std::sort(want.begin(), want.end());
      std::vector<std::pair<std::string, std::optional<std::string>>> got;
      for (const auto& m : available_actions(s)) got.emplace_back(m.action, m.target);
      ASSERT_EQ(got, want);
    }
  }
}

TEST(Runtime, PenaltyAction) {
  const auto def = game(R"(scenario "P" {
    role p { player } state S { entry } state E { exit }
    transition S -> S on action(oops) by p { score: -5 feedback: "Careful." }
    transition S -> E on action(go) by p {} })");
  GameSession s = start_session(def, 0);
  const StepResult r = apply_action(s, "oops");
  EXPECT_TRUE(r.accepted);
  EXPECT_EQ(s.score, -5);
  EXPECT_EQ(r.score_delta, -5);
  EXPECT_EQ(r.feedback, std::vector<std::string>{"Careful."});
  EXPECT_EQ(s.feedback_log.back(), "Careful.");
}

TEST(Runtime, FinalActionWins) {
  const auto def = reference("hospital");
  GameSession s = start_session(def, 0);
  const auto steps = golden("hospital");
  StepResult last;
  for (const auto& st : steps) last = advance(s, st.action, st.target);
  EXPECT_EQ(s.status, SessionStatus::Won);
  ASSERT_FALSE(last.events.empty());
  EXPECT_EQ(last.events.back().kind, EventKind::GameWon);
}

TEST(Runtime, DispatchMissChangesOnlyTheTurn) {
  const auto def = reference("hospital");
  GameSession s = start_session(def, 0);
  GameSession before = s;
  const StepResult r = apply_action(s, "teleport");
  EXPECT_FALSE(r.accepted);
  EXPECT_EQ(r.feedback, std::vector<std::string>{std::string(kUnavailableAction)});
  EXPECT_EQ(s.turn, 1u);
  before.turn = 1;
  EXPECT_EQ(s, before);
  // Right action, wrong target, is also a miss.
  EXPECT_FALSE(apply_action(s, "wear_gloves", std::string("door")).accepted);
  // NPC-owned transitions are not player moves.
  advance(s, "wear_gloves", std::string("gloves_box"));
  advance(s, "wear_mask", std::string("mask_box"));
  advance(s, "block_entrance", std::string("door"));
  EXPECT_FALSE(apply_action(s, "call_hazmat", std::string("phone")).accepted);
}

TEST(Runtime, TerminalAbsorption) {
  const auto def = reference("hospital");
  GameSession s = start_session(def, 0);
  for (const auto& st : golden("hospital")) advance(s, st.action, st.target);
  ASSERT_TRUE(s.terminal());
  const GameSession frozen = s;
  EXPECT_THROW(apply_action(s, "admit_patient"), SessionError);
  EXPECT_THROW(tick(s), SessionError);
  EXPECT_THROW(advance(s, "x"), SessionError);
  try {
    available_actions(s);
    FAIL();
  } catch (const SessionError& e) {
    EXPECT_EQ(e.kind(), SessionErrorKind::QueryOnFinished);
  }
  EXPECT_EQ(s, frozen);
}

TEST(Runtime, RunScriptExamples) {
  const auto def = reference("hospital");
  const Outcome empty = run_script(def, 0, {});
  EXPECT_EQ(empty.status, SessionStatus::Running);
  EXPECT_EQ(empty.final_score, 0);
  EXPECT_EQ(empty.visited, std::vector<std::string>{"Start"});
  EXPECT_EQ(empty.turns, 0u);

  const Outcome won = run_script(def, 0, golden("hospital"));
  EXPECT_EQ(won.status, SessionStatus::Won);
  EXPECT_EQ(won.final_score, 75);
  EXPECT_EQ(won.visited, (std::vector<std::string>{"Start", "GlovesOn", "MaskOn", "EntranceBlocked",
                                                   "Decontaminated", "End"}));

  auto wrong = golden("hospital");
  wrong.insert(wrong.begin(), {"skip_protection", std::string("door")});
  const Outcome o = run_script(def, 0, wrong);
  EXPECT_EQ(o.status, SessionStatus::Won);
  EXPECT_EQ(o.terminal_state, won.terminal_state);
  EXPECT_EQ(o.final_score, 65);
}

TEST(Runtime, RejectedStepsAndTrailingSteps) {
  auto steps = golden("hospital");
  steps.insert(steps.begin() + 1, {"dance", std::nullopt});
  steps.push_back({"wear_gloves", std::string("gloves_box")});
  const Outcome o = run_script(reference("hospital"), 0, steps);
  EXPECT_EQ(o.status, SessionStatus::Won);
  EXPECT_EQ(o.rejected_steps, std::vector<std::size_t>{1});
  EXPECT_EQ(o.steps_played, steps.size() - 1);
  EXPECT_EQ(o.turns, steps.size() - 1);
}

TEST(Runtime, EventOrderWithinAStep) {
  const auto def = reference("hospital");
  GameSession s = start_session(def, 0);
  const StepResult r = apply_action(s, "skip_protection", std::string("door"));
  EXPECT_EQ(kinds(r.events), (std::vector{EventKind::ScoreChanged, EventKind::HealthChanged, EventKind::Feedback}));
  EXPECT_EQ(r.events[1].value, 80);
}

TEST(Runtime, OnEnterFeedbackAndScriptedNpc) {
  const auto def = reference("hospital");
  GameSession s = start_session(def, 0);
  advance(s, "wear_gloves", std::string("gloves_box"));
  advance(s, "wear_mask", std::string("mask_box"));
  const StepResult r = advance(s, "block_entrance", std::string("door"));
  EXPECT_EQ(r.feedback, (std::vector<std::string>{"The contamination stays outside.", "Entrance sealed.",
                                                  "The secretary alerted the hazmat team."}));
  EXPECT_EQ(s.score, 10 + 10 + 15 + 5);
  // The script is spent: a second round adds nothing.
  advance(s, "skip_decontamination");
  EXPECT_EQ(s.score, 40 - 20);
}

TEST(Runtime, ScriptWaitsForItsState) {
  const auto def = reference("hospital");
  GameSession s = start_session(def, 0);
  for (int i = 0; i < 3; ++i) tick(s);
  EXPECT_EQ(s.npcs[0].script_pos, 0u);
  EXPECT_EQ(s.npcs[1].script_pos, 0u);
  EXPECT_EQ(s.score, 0);
  EXPECT_EQ(s.turn, 3u);
}

TEST(Runtime, PriorityListSkipsCompletedAndUndispatchable) {
  const auto def = reference("biogarden");
  GameSession s = start_session(def, 0);
  for (const auto& st : golden("biogarden")) {
    if (st.action == "submit_report") break;
    advance(s, st.action, st.target);
  }
  const std::size_t evaluator = *def->role_index("evaluator");
  std::size_t slot = 0;
  while (def->npc_table[slot].role != evaluator) ++slot;
  // review_decontamination (second entry) ran first, then review_roles.
  EXPECT_EQ(s.npcs[slot].completed, (std::vector<bool>{true, true}));
  EXPECT_EQ(s.score, 70);
}

TEST(Runtime, ChaseTakesLargerAxisFirst) {
  const auto def = game(arena("role hunter { npc position: (0, 0) behavior: chase(hero) }"));
  GameSession s = start_session(def, 0);
  const auto events = tick(s);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].kind, EventKind::NpcMoved);
  EXPECT_EQ(events[0].position, (GridPos{1, 0}));
  EXPECT_EQ(s.turn, 1u);
}

TEST(Runtime, ChaseTieGoesToXAndStopsWhenAdjacent) {
  const auto def = game(arena("role hunter { npc position: (1, 3) behavior: chase(hero) }"));
  GameSession s = start_session(def, 0);
  // hero at (3,1): dx=2 dy=-2 tie -> x; then dy dominates; then tie again.
  EXPECT_EQ(tick(s)[0].position, (GridPos{2, 3}));
  EXPECT_EQ(tick(s)[0].position, (GridPos{2, 2}));
  EXPECT_EQ(tick(s)[0].position, (GridPos{3, 2}));
  EXPECT_TRUE(tick(s).empty());  // Manhattan distance 1
}

TEST(Runtime, ChaseEntity) {
  const auto def = game(arena("role walker { npc position: (5, 8) behavior: chase(crate) }"));
  GameSession s = start_session(def, 0);
  EXPECT_EQ(tick(s)[0].position, (GridPos{5, 7}));
}

TEST(Runtime, AdjacentAttack) {
  const auto def = game(arena("role brute { npc position: (4, 2) behavior: attack(hero, damage=10) }"));
  GameSession s = start_session(def, 0);
  const auto events = tick(s);
  EXPECT_EQ(kinds(events), (std::vector{EventKind::NpcAttacked, EventKind::HealthChanged}));
  EXPECT_EQ(events[1].value, 90);
  EXPECT_EQ(s.player_health(), 90);
}

TEST(Runtime, DistantAttackerChases) {
  const auto def = game(arena("role brute { npc position: (3, 9) behavior: attack(hero) }"));
  GameSession s = start_session(def, 0);
  const auto events = tick(s);
  EXPECT_EQ(kinds(events), std::vector{EventKind::NpcMoved});
  EXPECT_EQ(events[0].position, (GridPos{3, 8}));
}

TEST(Runtime, AttackToZeroLoses) {
  const std::string src = R"(scenario "Last stand" {
  role hero { player health: 10 position: (3, 1) }
  role brute { npc position: (3, 2) behavior: attack(hero, damage=25) }
  state Start { entry } state End { exit }
  transition Start -> End on action(leave) by hero {}
})";
  GameSession s = start_session(game(src), 0);
  const auto events = tick(s);
  ASSERT_FALSE(events.empty());
  EXPECT_EQ(events.back().kind, EventKind::GameLost);
  EXPECT_EQ(s.player_health(), 0);
  EXPECT_EQ(s.status, SessionStatus::Lost);
  EXPECT_THROW(tick(s), SessionError);
}

TEST(Runtime, InteractWhenAdjacent) {
  const auto def = game(arena("role tech { npc position: (5, 7) behavior: interact(crate) }"));
  GameSession s = start_session(def, 0);
  EXPECT_EQ(kinds(tick(s)), std::vector{EventKind::NpcMoved});
  const auto events = tick(s);
  ASSERT_EQ(kinds(events), std::vector{EventKind::NpcInteracted});
  EXPECT_EQ(events[0].entity, def->entity_index("crate"));
}

TEST(Runtime, NpcsActInRoleOrder) {
  const auto def = game(arena("role a_hunter { npc position: (0, 0) behavior: chase(hero) }\n"
                              "  role b_hunter { npc position: (9, 1) behavior: chase(hero) }"));
  GameSession s = start_session(def, 0);
  const auto events = tick(s);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[0].role, def->role_index("a_hunter"));
  EXPECT_EQ(events[1].role, def->role_index("b_hunter"));
}

TEST(Runtime, LostTakesPrecedenceOverWon) {
  const auto def = game(R"(scenario "Pyrrhic" {
    role p { player health: 10 } state S { entry } state E { exit }
    transition S -> E on action(jump) by p { health(p): -10 } })");
  GameSession s = start_session(def, 0);
  const StepResult r = apply_action(s, "jump");
  EXPECT_EQ(s.status, SessionStatus::Lost);
  EXPECT_EQ(r.events.back().kind, EventKind::GameLost);
}

TEST(Runtime, FeedbackLogIsBounded) {
  ScenarioDoc doc = *parse(testsupport::read_source("scenarios/hospital.scn")).doc;
  doc.metadata["ui_feedback_log_depth"] = "2";
  auto def = std::make_shared<const GameDefinition>(compile(doc));
  GameSession s = start_session(def, 0);
  for (int i = 0; i < 3; ++i) advance(s, "skip_protection", std::string("door"));
  EXPECT_EQ(s.feedback_log.size(), 2u);
}

TEST(Runtime, RandomScriptProperties) {
  std::mt19937_64 rng(77);
  for (const char* name : {"hospital", "biogarden"}) {
    const auto def = reference(name);
    for (int i = 0; i < 200; ++i) {
      GameSession s = start_session(def, rng());
      std::int64_t applied = 0;
      std::uint64_t turn = 0;
      for (int k = 0; k < 40 && !s.terminal(); ++k) {
        const auto menu = available_actions(s);
        StepResult r;
        if (rng() % 5 == 0) {
          r = advance(s, "nonsense");
        } else {
          const auto& m = menu[rng() % menu.size()];
          r = advance(s, m.action, m.target);
        }
        for (const auto& e : r.events) {
          if (e.kind == EventKind::ScoreChanged) applied += e.delta;
        }
        EXPECT_EQ(s.turn, ++turn);
        for (std::size_t role = 0; role < def->roles.size(); ++role) {
          EXPECT_GE(s.health[role], 0);
          EXPECT_LE(s.health[role], def->roles[role].health);
        }
      }
      EXPECT_EQ(s.score - def->ui.initial_score, applied);
      EXPECT_EQ(s.status == SessionStatus::Lost, s.player_health() == 0);
    }
  }
}

TEST(Runtime, ReplayRoundTrip) {
  const Outcome o = run_script(reference("biogarden"), 0, golden("biogarden"));
  const std::string text = events_to_replay(o.events);
  EXPECT_EQ(events_from_replay(text), o.events);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), static_cast<long>(o.events.size()));
  EXPECT_THROW(events_from_replay("{\"turn\": 1}\n"), SchemaError);
}

TEST(Runtime, ParseScript) {
  const auto steps = parse_script("# header\nwear_gloves gloves_box\n\n  skip_mask  # trailing\r\n");
  ASSERT_EQ(steps.size(), 2u);
  EXPECT_EQ(steps[0], (ScriptStep{"wear_gloves", std::string("gloves_box")}));
  EXPECT_EQ(steps[1], (ScriptStep{"skip_mask", std::nullopt}));
}
