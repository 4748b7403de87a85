#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scengen/analyzer.hpp"
#include "scengen/assets.hpp"
#include "scengen/interchange.hpp"
#include "scengen/model.hpp"

namespace scengen {

inline constexpr std::string_view kBundleVersion = "1.0";

struct CompiledState {
  std::size_t index = 0;
  std::string name;
  StateKind kind = StateKind::Task;
  std::string description;
  std::optional<std::string> on_enter_feedback;

  bool operator==(const CompiledState&) const = default;
};

struct CompiledRole {
  std::size_t index = 0;
  std::string name;
  Controller controller = Controller::Player;
  int health = kDefaultHealth;
  std::optional<GridPos> position;

  bool operator==(const CompiledRole&) const = default;
};

struct CompiledEntity {
  std::size_t index = 0;
  std::string name;
  std::string tag;
  Placeholder placeholder = Placeholder::Cube;
  std::optional<GridPos> position;
  std::set<Verb> verbs;

  bool operator==(const CompiledEntity&) const = default;
};

struct HealthDelta {
  std::size_t role = 0;
  int delta = 0;

  bool operator==(const HealthDelta&) const = default;
};

struct CompiledTransition {
  std::size_t index = 0;
  std::size_t from = 0;
  std::size_t to = 0;
  std::string action;
  std::optional<std::string> target;
  std::size_t actor = 0;
  int score_delta = 0;
  std::vector<HealthDelta> health_deltas;
  std::optional<std::string> feedback;
  std::optional<std::string> dialogue;

  bool operator==(const CompiledTransition&) const = default;
};

struct ActionKey {
  std::size_t state = 0;
  std::string action;
  std::optional<std::string> target;

  auto operator<=>(const ActionKey&) const = default;
};

struct UiConfig {
  bool show_score = true;
  bool show_health = true;
  int feedback_log_depth = 20;
  int initial_score = 0;

  bool operator==(const UiConfig&) const = default;
};

struct CompiledNpc {
  std::size_t role = 0;
  BehaviorSpec behavior;
  std::optional<GridPos> position;

  bool operator==(const CompiledNpc&) const = default;
};

/// The generated game: state table, dispatch table, transition machine, UI.
struct GameDefinition {
  std::string version{kBundleVersion};
  std::string scenario_name;
  std::vector<CompiledState> states;  // index 0 is the Entry state
  std::vector<CompiledRole> roles;    // sorted by name
  std::vector<CompiledEntity> entities;
  std::vector<CompiledTransition> transitions;
  std::map<ActionKey, std::size_t> action_table;
  UiConfig ui;
  std::vector<AssetBinding> bindings;
  std::vector<CompiledNpc> npc_table;  // sorted by role index
  std::size_t entry_index = 0;
  std::size_t exit_index = 0;
  std::size_t player_index = 0;
  std::vector<std::size_t> progress_chain;

  const CompiledTransition* dispatch(std::size_t state, std::string_view action,
                                     const std::optional<std::string>& target) const;
  std::optional<std::size_t> role_index(std::string_view name) const;
  std::optional<std::size_t> entity_index(std::string_view name) const;
  std::optional<std::size_t> state_index(std::string_view name) const;

  bool operator==(const GameDefinition&) const = default;
};

/// Thrown when validate() reports errors; carries the report.
class RejectedScenario : public Error {
public:
  explicit RejectedScenario(DiagnosticReport report);
  const DiagnosticReport& report() const { return report_; }

private:
  DiagnosticReport report_;
};

class VersionError : public Error {
public:
  explicit VersionError(const std::string& found)
      : Error("unsupported bundle version '" + found + "' (expected " +
              std::string(kBundleVersion) + ")"),
        found_(found) {}
  const std::string& found() const { return found_; }

private:
  std::string found_;
};

class BundleError : public SchemaError {
public:
  using SchemaError::SchemaError;
};

/// Refuses documents whose validate() report has errors (RejectedScenario).
GameDefinition compile(const ScenarioDoc& doc, const AssetCatalog& catalog = {});

/// Same mapping without the analyzer gate. Only the structural checks the
/// compiler itself needs remain (InvalidScenario). Intended for test rigs.
GameDefinition compile_unchecked(const ScenarioDoc& doc, const AssetCatalog& catalog = {});

std::string emit_bundle(const GameDefinition& def);

/// Throws VersionError for unknown versions and BundleError for schema
/// violations (with a JSON-pointer path).
GameDefinition load_bundle(std::string_view text);

/// Human-readable differences; empty iff equal ignoring asset pack labels.
std::vector<std::string> diff_definitions(const GameDefinition& a, const GameDefinition& b);

}  // namespace scengen
