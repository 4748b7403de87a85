#include "scengen/runtime.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <tuple>

#include "detail/json_read.hpp"

namespace scengen {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

int manhattan(GridPos a, GridPos b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }
int chebyshev(GridPos a, GridPos b) { return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)); }

EngineEvent event(EventKind kind, std::uint64_t turn) {
  EngineEvent e;
  e.kind = kind;
  e.turn = turn;
  return e;
}

class Stepper {
public:
  Stepper(GameSession& s, std::vector<EngineEvent>& events, std::vector<std::string>* feedback)
      : s_(s), def_(s.def()), events_(events), feedback_(feedback) {}

  void emit_feedback(const std::string& text, bool log = true) {
    EngineEvent e = event(EventKind::Feedback, s_.turn);
    e.text = text;
    events_.push_back(std::move(e));
    if (feedback_) feedback_->push_back(text);
    if (!log) return;
    s_.feedback_log.push_back(text);
    while (s_.feedback_log.size() > static_cast<std::size_t>(def_.ui.feedback_log_depth)) {
      s_.feedback_log.pop_front();
    }
  }

  void change_health(std::size_t role, int delta) {
    const int before = s_.health[role];
    const int after = std::clamp(before + delta, 0, def_.roles[role].health);
    s_.health[role] = after;
    EngineEvent e = event(EventKind::HealthChanged, s_.turn);
    e.role = role;
    e.delta = after - before;
    e.value = after;
    events_.push_back(std::move(e));
  }

  /// Applies a dispatched transition. Returns the score delta applied.
  std::int64_t fire(const CompiledTransition& t) {
    const bool moved = s_.current_state != t.to;
    s_.current_state = t.to;
    if (moved) {
      EngineEvent e = event(EventKind::StateEntered, s_.turn);
      e.state = t.to;
      events_.push_back(std::move(e));
    }
    if (t.score_delta != 0) {
      s_.score += t.score_delta;
      EngineEvent e = event(EventKind::ScoreChanged, s_.turn);
      e.delta = t.score_delta;
      e.value = s_.score;
      events_.push_back(std::move(e));
    }
    for (const auto& h : t.health_deltas) change_health(h.role, h.delta);
    if (t.feedback) emit_feedback(*t.feedback);
    if (moved && def_.states[t.to].on_enter_feedback) emit_feedback(*def_.states[t.to].on_enter_feedback);
    settle();
    return t.score_delta;
  }

  void settle() {
    if (s_.status != SessionStatus::Running) return;
    if (s_.player_health() == 0) {
      s_.status = SessionStatus::Lost;
      EngineEvent e = event(EventKind::GameLost, s_.turn);
      e.state = s_.current_state;
      e.value = s_.score;
      events_.push_back(std::move(e));
    } else if (def_.states[s_.current_state].kind == StateKind::Exit) {
      s_.status = SessionStatus::Won;
      EngineEvent e = event(EventKind::GameWon, s_.turn);
      e.state = s_.current_state;
      e.value = s_.score;
      events_.push_back(std::move(e));
    }
  }

  void npc_phase() {
    for (std::size_t i = 0; i < def_.npc_table.size(); ++i) {
      if (s_.terminal()) return;
      step_npc(i);
    }
  }

private:
  std::optional<GridPos> target_position(const std::string& name) const {
    if (auto r = def_.role_index(name)) return s_.positions[*r];
    if (auto e = def_.entity_index(name)) return def_.entities[*e].position;
    return std::nullopt;
  }

  bool try_action(std::size_t role, const ActionSpec& a) {
    const CompiledTransition* t = def_.dispatch(s_.current_state, a.name, a.target);
    if (!t || t->actor != role) return false;
    fire(*t);
    return true;
  }

  void chase(std::size_t role, const std::string& target) {
    auto& self = s_.positions[role];
    const auto goal = target_position(target);
    if (!self || !goal || manhattan(*self, *goal) <= 1) return;
    const int dx = goal->x - self->x;
    const int dy = goal->y - self->y;
    if (std::abs(dx) >= std::abs(dy)) {
      self->x += dx > 0 ? 1 : -1;
    } else {
      self->y += dy > 0 ? 1 : -1;
    }
    EngineEvent e = event(EventKind::NpcMoved, s_.turn);
    e.role = role;
    e.position = *self;
    events_.push_back(std::move(e));
  }

  void step_npc(std::size_t i) {
    const CompiledNpc& npc = def_.npc_table[i];
    NpcProgress& progress = s_.npcs[i];
    const BehaviorSpec& b = npc.behavior;
    const std::size_t role = npc.role;

    switch (b.kind) {
      case BehaviorKind::Idle:
        break;
      case BehaviorKind::Script:
        if (progress.script_pos < b.script.size() && try_action(role, b.script[progress.script_pos])) {
          ++progress.script_pos;
        }
        break;
      case BehaviorKind::PriorityList:
        for (std::size_t k = 0; k < b.priorities.size(); ++k) {
          if (progress.completed[k]) continue;
          if (try_action(role, b.priorities[k])) {
            progress.completed[k] = true;
            break;
          }
        }
        break;
      case BehaviorKind::Chase:
        chase(role, *b.target);
        break;
      case BehaviorKind::Attack: {
        const auto victim = def_.role_index(*b.target);
        const auto& self = s_.positions[role];
        const auto& other = victim ? s_.positions[*victim] : std::optional<GridPos>{};
        if (victim && self && other && chebyshev(*self, *other) <= 1) {
          const int before = s_.health[*victim];
          const int after = std::max(0, before - b.attack_damage);
          EngineEvent a = event(EventKind::NpcAttacked, s_.turn);
          a.role = role;
          a.target_role = *victim;
          a.delta = after - before;
          events_.push_back(std::move(a));
          s_.health[*victim] = after;
          EngineEvent h = event(EventKind::HealthChanged, s_.turn);
          h.role = *victim;
          h.delta = after - before;
          h.value = after;
          events_.push_back(std::move(h));
          settle();
        } else {
          chase(role, *b.target);
        }
        break;
      }
      case BehaviorKind::Interact: {
        const auto entity = def_.entity_index(*b.target);
        const auto& self = s_.positions[role];
        const auto goal = entity ? def_.entities[*entity].position : std::nullopt;
        if (self && goal && chebyshev(*self, *goal) <= 1) {
          EngineEvent e = event(EventKind::NpcInteracted, s_.turn);
          e.role = role;
          e.entity = *entity;
          events_.push_back(std::move(e));
        } else {
          chase(role, *b.target);
        }
        break;
      }
    }
  }

  GameSession& s_;
  const GameDefinition& def_;
  std::vector<EngineEvent>& events_;
  std::vector<std::string>* feedback_;
};

StepResult player_step(GameSession& session, std::string_view action,
                       const std::optional<std::string>& target) {
  if (session.terminal()) throw SessionError(SessionErrorKind::ActOnFinished);
  ++session.turn;
  StepResult result;
  Stepper stepper(session, result.events, &result.feedback);
  const GameDefinition& def = session.def();
  const CompiledTransition* t = def.dispatch(session.current_state, action, target);
  if (!t || t->actor != def.player_index) {
    result.accepted = false;
    result.new_state = session.current_state;
    stepper.emit_feedback(std::string(kUnavailableAction), false);
    return result;
  }
  result.accepted = true;
  result.score_delta = stepper.fire(*t);
  result.new_state = session.current_state;
  return result;
}

using detail::ojson;
using ReplayReader = detail::Reader<SchemaError>;

}  // namespace

SessionError::SessionError(SessionErrorKind kind)
    : Error(kind == SessionErrorKind::QueryOnFinished ? "query on a finished session"
                                                      : "action on a finished session"),
      kind_(kind) {}

bool GameSession::operator==(const GameSession& o) const {
  const bool same_def = definition == o.definition ||
                        (definition && o.definition && *definition == *o.definition);
  return same_def && current_state == o.current_state && score == o.score && health == o.health &&
         positions == o.positions && feedback_log == o.feedback_log && turn == o.turn &&
         rng_state == o.rng_state && status == o.status && npcs == o.npcs;
}

GameSession start_session(std::shared_ptr<const GameDefinition> def, std::uint64_t seed) {
  GameSession s;
  s.current_state = def->entry_index;
  s.score = def->ui.initial_score;
  for (const auto& r : def->roles) {
    s.health.push_back(r.health);
    s.positions.push_back(r.position);
  }
  for (const auto& n : def->npc_table) {
    s.positions[n.role] = n.position;
    NpcProgress p;
    p.completed.assign(n.behavior.priorities.size(), false);
    s.npcs.push_back(std::move(p));
  }
  s.rng_state = splitmix64(seed);
  s.definition = std::move(def);
  return s;
}

GameSession start_session(const GameDefinition& def, std::uint64_t seed) {
  return start_session(std::make_shared<const GameDefinition>(def), seed);
}

std::vector<MenuItem> available_actions(const GameSession& session) {
  if (session.terminal()) throw SessionError(SessionErrorKind::QueryOnFinished);
  const GameDefinition& def = session.def();
  std::vector<MenuItem> out;
  for (const auto& t : def.transitions) {
    if (t.from != session.current_state || t.actor != def.player_index) continue;
    out.push_back({t.action, t.target, t.dialogue.value_or(t.action), t.index});
  }
  std::sort(out.begin(), out.end(), [](const MenuItem& a, const MenuItem& b) {
    return std::tie(a.action, a.target) < std::tie(b.action, b.target);
  });
  return out;
}

StepResult apply_action(GameSession& session, std::string_view action,
                        const std::optional<std::string>& target) {
  return player_step(session, action, target);
}

std::vector<EngineEvent> tick(GameSession& session) {
  if (session.terminal()) throw SessionError(SessionErrorKind::ActOnFinished);
  ++session.turn;
  std::vector<EngineEvent> events;
  Stepper(session, events, nullptr).npc_phase();
  return events;
}

StepResult advance(GameSession& session, std::string_view action,
                   const std::optional<std::string>& target) {
  StepResult result = player_step(session, action, target);
  if (!session.terminal()) {
    Stepper(session, result.events, &result.feedback).npc_phase();
  }
  return result;
}

Outcome run_script(std::shared_ptr<const GameDefinition> def, std::uint64_t seed,
                   const std::vector<ScriptStep>& script) {
  GameSession session = start_session(std::move(def), seed);
  Outcome out;
  out.visited.push_back(session.def().states[session.current_state].name);
  for (std::size_t i = 0; i < script.size() && !session.terminal(); ++i) {
    StepResult r = advance(session, script[i].action, script[i].target);
    ++out.steps_played;
    if (!r.accepted) out.rejected_steps.push_back(i);
    for (auto& e : r.events) {
      if (e.kind == EventKind::StateEntered) out.visited.push_back(session.def().states[*e.state].name);
      out.events.push_back(std::move(e));
    }
  }
  out.status = session.status;
  out.final_score = session.score;
  out.turns = session.turn;
  out.terminal_state = session.current_state;
  return out;
}

Outcome run_script(const GameDefinition& def, std::uint64_t seed, const std::vector<ScriptStep>& script) {
  return run_script(std::make_shared<const GameDefinition>(def), seed, script);
}

std::vector<ScriptStep> parse_script(std::string_view text) {
  std::vector<ScriptStep> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<std::string> words;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) words.emplace_back(line.substr(i, j - i));
      i = j;
    }
    if (words.empty()) continue;
    if (words.size() > 2) throw Error("script line '" + std::string(line) + "' has more than two words");
    ScriptStep step{words[0], std::nullopt};
    if (words.size() == 2) step.target = words[1];
    out.push_back(std::move(step));
  }
  return out;
}

std::string events_to_replay(const std::vector<EngineEvent>& events) {
  std::string out;
  for (const auto& e : events) {
    ojson j;
    j["turn"] = e.turn;
    j["kind"] = to_string(e.kind);
    if (e.state) j["state"] = *e.state;
    if (e.role) j["role"] = *e.role;
    if (e.target_role) j["target_role"] = *e.target_role;
    if (e.entity) j["entity"] = *e.entity;
    if (e.position) j["position"] = ojson{{"x", e.position->x}, {"y", e.position->y}};
    if (e.delta != 0) j["delta"] = e.delta;
    if (e.value != 0) j["value"] = e.value;
    if (!e.text.empty()) j["text"] = e.text;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<EngineEvent> events_from_replay(std::string_view text) {
  static constexpr EventKind kKinds[] = {
      EventKind::StateEntered, EventKind::ScoreChanged, EventKind::HealthChanged,
      EventKind::NpcMoved,     EventKind::NpcAttacked,  EventKind::NpcInteracted,
      EventKind::Feedback,     EventKind::GameWon,      EventKind::GameLost};
  std::vector<EngineEvent> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    bool ok = false;
    const ojson j = detail::parse_json_text(line, ok);
    const std::string path = "/" + std::to_string(line_no);
    if (!ok) throw Error("replay line " + std::to_string(line_no) + " is not JSON");
    EngineEvent e;
    e.turn = static_cast<std::uint64_t>(ReplayReader::integer(ReplayReader::field(j, "turn", path), path));
    const std::string kind = ReplayReader::str(ReplayReader::field(j, "kind", path), path);
    auto it = std::find_if(std::begin(kKinds), std::end(kKinds),
                           [&](EventKind k) { return to_string(k) == kind; });
    if (it == std::end(kKinds)) throw Error("replay line " + std::to_string(line_no) + ": unknown kind");
    e.kind = *it;
    auto idx = [&](const char* key) -> std::optional<std::size_t> {
      if (!j.contains(key)) return std::nullopt;
      return ReplayReader::index(j.at(key), path);
    };
    e.state = idx("state");
    e.role = idx("role");
    e.target_role = idx("target_role");
    e.entity = idx("entity");
    if (j.contains("position")) {
      e.position = GridPos{ReplayReader::int32(j.at("position").at("x"), path),
                           ReplayReader::int32(j.at("position").at("y"), path)};
    }
    if (j.contains("delta")) e.delta = ReplayReader::integer(j.at("delta"), path);
    if (j.contains("value")) e.value = ReplayReader::integer(j.at("value"), path);
    if (j.contains("text")) e.text = ReplayReader::str(j.at("text"), path);
    out.push_back(std::move(e));
  }
  return out;
}

std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::Running: return "running";
    case SessionStatus::Won: return "won";
    case SessionStatus::Lost: return "lost";
  }
  return "?";
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::StateEntered: return "StateEntered";
    case EventKind::ScoreChanged: return "ScoreChanged";
    case EventKind::HealthChanged: return "HealthChanged";
    case EventKind::NpcMoved: return "NpcMoved";
    case EventKind::NpcAttacked: return "NpcAttacked";
    case EventKind::NpcInteracted: return "NpcInteracted";
    case EventKind::Feedback: return "Feedback";
    case EventKind::GameWon: return "GameWon";
    case EventKind::GameLost: return "GameLost";
  }
  return "?";
}

}  // namespace scengen
