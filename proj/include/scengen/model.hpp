#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scengen {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class ScenarioMode { Linear };
enum class Controller { Player, Npc };
enum class Placeholder { Cube, Sphere, Capsule };
enum class Verb { Move, Push, Pull, Use };
enum class StateKind { Entry, Exit, Task };
enum class EffectKind { Score, Health };
enum class GoalKind { Reach };
enum class BehaviorKind { Idle, Script, Chase, Attack, Interact, PriorityList };

inline constexpr int kDefaultHealth = 100;
inline constexpr int kDefaultAttackDamage = 10;
inline constexpr int kGridSize = 256;

struct GridPos {
  int x = 0;
  int y = 0;

  bool valid() const { return x >= 0 && y >= 0 && x < kGridSize && y < kGridSize; }
  auto operator<=>(const GridPos&) const = default;
};

struct ActionSpec {
  std::string name;
  std::optional<std::string> target;
  std::optional<std::string> dialogue;

  bool operator==(const ActionSpec&) const = default;
};

struct BehaviorSpec {
  BehaviorKind kind = BehaviorKind::Idle;
  std::vector<ActionSpec> script;      // Script only
  std::optional<std::string> target;   // Chase / Attack / Interact
  std::vector<ActionSpec> priorities;  // PriorityList only
  int attack_damage = kDefaultAttackDamage;  // meaningful for Attack only

  bool operator==(const BehaviorSpec&) const = default;
};

struct Role {
  std::string name;
  Controller controller = Controller::Player;
  std::optional<BehaviorSpec> behavior;
  int health = kDefaultHealth;
  std::optional<GridPos> position;

  bool operator==(const Role&) const = default;
};

struct Entity {
  std::string name;
  std::string tag;
  Placeholder placeholder = Placeholder::Cube;
  std::optional<GridPos> position;
  std::set<Verb> verbs;

  bool operator==(const Entity&) const = default;
};

struct StateNode {
  std::string name;
  StateKind kind = StateKind::Task;
  std::string description;
  std::optional<std::string> on_enter_feedback;

  bool operator==(const StateNode&) const = default;
};

struct ScoreEffect {
  EffectKind kind = EffectKind::Score;
  int delta = 0;
  std::optional<std::string> subject;  // Health only

  bool operator==(const ScoreEffect&) const = default;
};

struct TransitionRule {
  std::string from;
  std::string to;
  ActionSpec action;
  std::string actor;
  std::vector<ScoreEffect> effects;
  std::optional<std::string> feedback;

  bool operator==(const TransitionRule&) const = default;
};

struct Goal {
  GoalKind kind = GoalKind::Reach;
  std::string state;

  bool operator==(const Goal&) const = default;
};

struct ScenarioDoc {
  std::string name;
  ScenarioMode mode = ScenarioMode::Linear;
  std::vector<Role> roles;
  std::vector<Entity> entities;
  std::vector<StateNode> states;
  std::vector<TransitionRule> transitions;
  std::vector<Goal> goals;
  std::map<std::string, std::string> metadata;

  const Role* find_role(std::string_view name) const;
  const Entity* find_entity(std::string_view name) const;
  const StateNode* find_state(std::string_view name) const;

  bool operator==(const ScenarioDoc&) const = default;
};

struct ScenarioSummary {
  std::size_t state_count = 0;
  std::size_t transition_count = 0;
  std::size_t role_count = 0;
  std::size_t entity_count = 0;

  bool operator==(const ScenarioSummary&) const = default;
};

enum class IdKind { Role, Entity, State };

class DuplicateIdError : public Error {
public:
  DuplicateIdError(IdKind kind, std::string id);
  IdKind kind() const { return kind_; }
  const std::string& id() const { return id_; }

private:
  IdKind kind_;
  std::string id_;
};

/// A model invariant broken by a document that did not come from the parser.
class InvalidScenario : public Error {
public:
  using Error::Error;
};

struct DuplicateId {
  IdKind kind;
  std::string id;
  bool operator==(const DuplicateId&) const = default;
};

/// All identifiers declared more than once, in declaration order. O(n log n).
std::vector<DuplicateId> find_duplicate_ids(const ScenarioDoc& doc);

/// Sorts roles/entities/states by name, transitions by (from, action, to, target)
/// and goals by state. Idempotent. Throws DuplicateIdError.
ScenarioDoc normalize(ScenarioDoc doc);

ScenarioSummary summary(const ScenarioDoc& doc);

/// Violations of the structural invariants the compiler relies on (references
/// resolve, one player, one entry, one exit at least, unique dispatch keys).
/// Empty for every document the parser accepts.
std::vector<std::string> structural_violations(const ScenarioDoc& doc);

/// Action names match [a-z][a-z0-9_]{0,63}.
bool is_valid_action_name(std::string_view name);

/// Built-in verb for an action name ("move", "push", "pull", "use").
std::optional<Verb> verb_from_action(std::string_view name);

std::string_view to_string(ScenarioMode v);
std::string_view to_string(Controller v);
std::string_view to_string(Placeholder v);
std::string_view to_string(Verb v);
std::string_view to_string(StateKind v);
std::string_view to_string(EffectKind v);
std::string_view to_string(BehaviorKind v);
std::string_view to_string(IdKind v);

std::optional<ScenarioMode> mode_from_string(std::string_view s);
std::optional<Controller> controller_from_string(std::string_view s);
std::optional<Placeholder> placeholder_from_string(std::string_view s);
std::optional<Verb> verb_from_string(std::string_view s);
std::optional<StateKind> state_kind_from_string(std::string_view s);
std::optional<BehaviorKind> behavior_kind_from_string(std::string_view s);

}  // namespace scengen
