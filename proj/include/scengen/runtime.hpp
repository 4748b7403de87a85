#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scengen/compiler.hpp"

namespace scengen {

enum class SessionStatus { Running, Won, Lost };

enum class EventKind {
  StateEntered,
  ScoreChanged,
  HealthChanged,
  NpcMoved,
  NpcAttacked,
  NpcInteracted,
  Feedback,
  GameWon,
  GameLost,
};

/// Payload fields are populated per kind:
///   StateEntered: state            ScoreChanged: delta, value (new score)
///   HealthChanged: role, delta, value (new health)
///   NpcMoved: role, position       NpcAttacked: role, target_role, delta
///   NpcInteracted: role, entity    Feedback: text
///   GameWon / GameLost: state, value (final score)
struct EngineEvent {
  EventKind kind = EventKind::Feedback;
  std::uint64_t turn = 0;
  std::optional<std::size_t> state;
  std::optional<std::size_t> role;
  std::optional<std::size_t> target_role;
  std::optional<std::size_t> entity;
  std::optional<GridPos> position;
  std::int64_t delta = 0;
  std::int64_t value = 0;
  std::string text;

  bool operator==(const EngineEvent&) const = default;
};

struct NpcProgress {
  std::size_t script_pos = 0;
  std::vector<bool> completed;  // PriorityList entries already executed

  bool operator==(const NpcProgress&) const = default;
};

/// Live play state. Single-threaded; copyable (path enumeration forks it).
struct GameSession {
  std::shared_ptr<const GameDefinition> definition;
  std::size_t current_state = 0;
  std::int64_t score = 0;
  std::vector<int> health;                       // per role index
  std::vector<std::optional<GridPos>> positions; // per role index
  std::deque<std::string> feedback_log;          // oldest first, bounded by ui depth
  std::uint64_t turn = 0;
  std::uint64_t rng_state = 0;
  SessionStatus status = SessionStatus::Running;
  std::vector<NpcProgress> npcs;                 // parallel to definition->npc_table

  const GameDefinition& def() const { return *definition; }
  int player_health() const { return health[definition->player_index]; }
  bool terminal() const { return status != SessionStatus::Running; }

  bool operator==(const GameSession& other) const;
};

struct MenuItem {
  std::string action;
  std::optional<std::string> target;
  std::string label;  // dialogue text, or the action name when none was authored
  std::size_t transition = 0;

  bool operator==(const MenuItem&) const = default;
};

struct StepResult {
  bool accepted = false;
  std::size_t new_state = 0;
  std::int64_t score_delta = 0;
  std::vector<std::string> feedback;
  std::vector<EngineEvent> events;
};

enum class SessionErrorKind { QueryOnFinished, ActOnFinished };

class SessionError : public Error {
public:
  explicit SessionError(SessionErrorKind kind);
  SessionErrorKind kind() const { return kind_; }

private:
  SessionErrorKind kind_;
};

inline constexpr std::string_view kUnavailableAction = "unavailable action";

GameSession start_session(std::shared_ptr<const GameDefinition> def, std::uint64_t seed);
GameSession start_session(const GameDefinition& def, std::uint64_t seed);

/// Player-actor transitions leaving the current state, sorted by (action, target).
std::vector<MenuItem> available_actions(const GameSession& session);

/// One player action. A dispatch miss is rejected: only the turn advances.
StepResult apply_action(GameSession& session, std::string_view action,
                        const std::optional<std::string>& target = std::nullopt);

/// One NPC behavior step for every NPC in role-index order.
std::vector<EngineEvent> tick(GameSession& session);

/// One round: apply_action followed by the NPC phase (skipped once the game
/// is over). Counts as a single turn.
StepResult advance(GameSession& session, std::string_view action,
                   const std::optional<std::string>& target = std::nullopt);

struct ScriptStep {
  std::string action;
  std::optional<std::string> target;

  auto operator<=>(const ScriptStep&) const = default;
};

struct Outcome {
  SessionStatus status = SessionStatus::Running;
  std::int64_t final_score = 0;
  std::vector<std::string> visited;  // entry first, then every state entered
  std::uint64_t turns = 0;
  std::size_t terminal_state = 0;
  std::vector<std::size_t> rejected_steps;  // script positions that missed the action table
  std::size_t steps_played = 0;             // script steps consumed before a terminal status
  std::vector<EngineEvent> events;

  bool operator==(const Outcome&) const = default;
};

/// Plays `script` one round per step on a fresh session. Steps after a
/// terminal status are not played.
Outcome run_script(const GameDefinition& def, std::uint64_t seed, const std::vector<ScriptStep>& script);
Outcome run_script(std::shared_ptr<const GameDefinition> def, std::uint64_t seed,
                   const std::vector<ScriptStep>& script);

/// Script files: one step per line, `action [target]`; '#' comments.
std::vector<ScriptStep> parse_script(std::string_view text);

/// `.replay` text: one JSON object per event and line.
std::string events_to_replay(const std::vector<EngineEvent>& events);
std::vector<EngineEvent> events_from_replay(std::string_view text);

std::string_view to_string(SessionStatus s);
std::string_view to_string(EventKind k);

}  // namespace scengen
