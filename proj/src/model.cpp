#include "scengen/model.hpp"

#include <algorithm>
#include <array>
#include <tuple>
#include <utility>

namespace scengen {

namespace {

template <typename T>
const T* find_by_name(const std::vector<T>& items, std::string_view name) {
  auto it = std::find_if(items.begin(), items.end(),
                         [&](const T& item) { return item.name == name; });
  return it == items.end() ? nullptr : &*it;
}

template <typename T>
void collect_duplicates(const std::vector<T>& items, IdKind kind,
                        std::vector<DuplicateId>& out) {
  std::set<std::string_view> seen;
  for (const auto& item : items) {
    if (!seen.insert(item.name).second) out.push_back({kind, item.name});
  }
}

template <typename T>
void sort_by_name(std::vector<T>& items) {
  std::stable_sort(items.begin(), items.end(),
                   [](const T& a, const T& b) { return a.name < b.name; });
}

auto transition_key(const TransitionRule& t) {
  return std::tie(t.from, t.action.name, t.to, t.action.target);
}

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::pair<std::string_view, Enum>, N>& table,
                           std::string_view s) {
  for (const auto& [name, value] : table) {
    if (name == s) return value;
  }
  return std::nullopt;
}

template <typename Enum, std::size_t N>
std::string_view reverse(const std::array<std::pair<std::string_view, Enum>, N>& table,
                         Enum v) {
  for (const auto& [name, value] : table) {
    if (value == v) return name;
  }
  return "?";
}

constexpr std::array<std::pair<std::string_view, ScenarioMode>, 1> kModes{{
    {"linear", ScenarioMode::Linear}}};
constexpr std::array<std::pair<std::string_view, Controller>, 2> kControllers{{
    {"player", Controller::Player}, {"npc", Controller::Npc}}};
constexpr std::array<std::pair<std::string_view, Placeholder>, 3> kPlaceholders{{
    {"cube", Placeholder::Cube}, {"sphere", Placeholder::Sphere}, {"capsule", Placeholder::Capsule}}};
constexpr std::array<std::pair<std::string_view, Verb>, 4> kVerbs{{
    {"move", Verb::Move}, {"push", Verb::Push}, {"pull", Verb::Pull}, {"use", Verb::Use}}};
constexpr std::array<std::pair<std::string_view, StateKind>, 3> kStateKinds{{
    {"entry", StateKind::Entry}, {"exit", StateKind::Exit}, {"task", StateKind::Task}}};
constexpr std::array<std::pair<std::string_view, EffectKind>, 2> kEffectKinds{{
    {"score", EffectKind::Score}, {"health", EffectKind::Health}}};
constexpr std::array<std::pair<std::string_view, BehaviorKind>, 6> kBehaviorKinds{{
    {"idle", BehaviorKind::Idle},
    {"script", BehaviorKind::Script},
    {"chase", BehaviorKind::Chase},
    {"attack", BehaviorKind::Attack},
    {"interact", BehaviorKind::Interact},
    {"priority", BehaviorKind::PriorityList}}};
constexpr std::array<std::pair<std::string_view, IdKind>, 3> kIdKinds{{
    {"role", IdKind::Role}, {"entity", IdKind::Entity}, {"state", IdKind::State}}};

}  // namespace

const Role* ScenarioDoc::find_role(std::string_view n) const { return find_by_name(roles, n); }
const Entity* ScenarioDoc::find_entity(std::string_view n) const {
  return find_by_name(entities, n);
}
const StateNode* ScenarioDoc::find_state(std::string_view n) const {
  return find_by_name(states, n);
}

DuplicateIdError::DuplicateIdError(IdKind kind, std::string id)
    : Error("duplicate " + std::string(to_string(kind)) + " identifier '" + id + "'"),
      kind_(kind),
      id_(std::move(id)) {}

std::vector<DuplicateId> find_duplicate_ids(const ScenarioDoc& doc) {
  std::vector<DuplicateId> out;
  collect_duplicates(doc.roles, IdKind::Role, out);
  collect_duplicates(doc.entities, IdKind::Entity, out);
  collect_duplicates(doc.states, IdKind::State, out);
  return out;
}

ScenarioDoc normalize(ScenarioDoc doc) {
  if (auto dups = find_duplicate_ids(doc); !dups.empty()) {
    throw DuplicateIdError(dups.front().kind, dups.front().id);
  }
  sort_by_name(doc.roles);
  sort_by_name(doc.entities);
  sort_by_name(doc.states);
  std::stable_sort(doc.transitions.begin(), doc.transitions.end(),
                   [](const TransitionRule& a, const TransitionRule& b) {
                     return transition_key(a) < transition_key(b);
                   });
  std::stable_sort(doc.goals.begin(), doc.goals.end(),
                   [](const Goal& a, const Goal& b) { return a.state < b.state; });
  return doc;
}

ScenarioSummary summary(const ScenarioDoc& doc) {
  return {doc.states.size(), doc.transitions.size(), doc.roles.size(), doc.entities.size()};
}

bool is_valid_action_name(std::string_view name) {
  if (name.empty() || name.size() > 64) return false;
  if (name[0] < 'a' || name[0] > 'z') return false;
  return std::all_of(name.begin() + 1, name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

std::optional<Verb> verb_from_action(std::string_view name) { return verb_from_string(name); }

std::vector<std::string> structural_violations(const ScenarioDoc& doc) {
  std::vector<std::string> out;
  for (const auto& d : find_duplicate_ids(doc)) {
    out.push_back("duplicate " + std::string(to_string(d.kind)) + " '" + d.id + "'");
  }

  auto players = std::count_if(doc.roles.begin(), doc.roles.end(), [](const Role& r) {
    return r.controller == Controller::Player;
  });
  if (players != 1) {
    out.push_back("expected exactly one player role, found " + std::to_string(players));
  }
  for (const auto& r : doc.roles) {
    if (r.controller == Controller::Player && r.behavior) {
      out.push_back("player role '" + r.name + "' carries a behavior");
    }
    if (r.health < 0) out.push_back("role '" + r.name + "' has negative health");
    if (r.position && !r.position->valid()) {
      out.push_back("role '" + r.name + "' position outside the grid");
    }
    if (!r.behavior) continue;
    const auto& b = *r.behavior;
    const bool wants_target = b.kind == BehaviorKind::Chase || b.kind == BehaviorKind::Attack ||
                              b.kind == BehaviorKind::Interact;
    if (wants_target != b.target.has_value()) {
      out.push_back("behavior of '" + r.name + "' has mismatched target field");
    }
    if (b.kind == BehaviorKind::Script && b.script.empty()) {
      out.push_back("script behavior of '" + r.name + "' is empty");
    }
    if (b.kind != BehaviorKind::Script && !b.script.empty()) {
      out.push_back("behavior of '" + r.name + "' has a script but is not a script");
    }
    if (b.kind == BehaviorKind::PriorityList && b.priorities.empty()) {
      out.push_back("priority behavior of '" + r.name + "' is empty");
    }
    if (b.kind != BehaviorKind::PriorityList && !b.priorities.empty()) {
      out.push_back("behavior of '" + r.name + "' has priorities but is not a priority list");
    }
    if (b.attack_damage < 0) out.push_back("behavior of '" + r.name + "' has negative damage");
    if (b.kind != BehaviorKind::Attack && b.attack_damage != kDefaultAttackDamage) {
      out.push_back("behavior of '" + r.name + "' sets damage but does not attack");
    }
    if (b.kind == BehaviorKind::Attack && b.target && !doc.find_role(*b.target)) {
      out.push_back("attack target '" + *b.target + "' is not a role");
    }
    if (b.kind == BehaviorKind::Interact && b.target && !doc.find_entity(*b.target)) {
      out.push_back("interact target '" + *b.target + "' is not an entity");
    }
    if (b.kind == BehaviorKind::Chase && b.target && !doc.find_role(*b.target) &&
        !doc.find_entity(*b.target)) {
      out.push_back("chase target '" + *b.target + "' does not exist");
    }
    for (const auto* list : {&b.script, &b.priorities}) {
      for (const auto& a : *list) {
        if (!is_valid_action_name(a.name)) out.push_back("invalid action name '" + a.name + "'");
        if (a.dialogue) out.push_back("behavior action '" + a.name + "' carries dialogue");
        if (a.target && !doc.find_entity(*a.target)) {
          out.push_back("action target '" + *a.target + "' does not exist");
        }
      }
    }
  }

  for (const auto& e : doc.entities) {
    if (e.tag.empty()) out.push_back("entity '" + e.name + "' has an empty tag");
    if (e.position && !e.position->valid()) {
      out.push_back("entity '" + e.name + "' position outside the grid");
    }
  }

  std::set<std::tuple<std::string, std::string, std::optional<std::string>>> keys;
  for (const auto& t : doc.transitions) {
    const std::string where = t.from + " -> " + t.to + " on " + t.action.name;
    if (!doc.find_state(t.from)) out.push_back(where + ": unknown state '" + t.from + "'");
    if (!doc.find_state(t.to)) out.push_back(where + ": unknown state '" + t.to + "'");
    if (!doc.find_role(t.actor)) out.push_back(where + ": unknown role '" + t.actor + "'");
    if (!is_valid_action_name(t.action.name)) out.push_back(where + ": invalid action name");
    if (t.action.target) {
      const Entity* e = doc.find_entity(*t.action.target);
      if (!e) {
        out.push_back(where + ": unknown entity '" + *t.action.target + "'");
      } else if (auto verb = verb_from_action(t.action.name); verb && !e->verbs.count(*verb)) {
        out.push_back(where + ": entity '" + e->name + "' does not support the verb");
      }
    }
    for (const auto& fx : t.effects) {
      if ((fx.kind == EffectKind::Health) != fx.subject.has_value()) {
        out.push_back(where + ": effect subject mismatch");
      } else if (fx.subject && !doc.find_role(*fx.subject)) {
        out.push_back(where + ": unknown role '" + *fx.subject + "'");
      }
    }
    if (!keys.emplace(t.from, t.action.name, t.action.target).second) {
      out.push_back(where + ": duplicate dispatch key");
    }
  }

  for (const auto& g : doc.goals) {
    const StateNode* s = doc.find_state(g.state);
    if (!s || s->kind != StateKind::Exit) {
      out.push_back("goal references '" + g.state + "' which is not an exit state");
    }
  }
  return out;
}

std::string_view to_string(ScenarioMode v) { return reverse(kModes, v); }
std::string_view to_string(Controller v) { return reverse(kControllers, v); }
std::string_view to_string(Placeholder v) { return reverse(kPlaceholders, v); }
std::string_view to_string(Verb v) { return reverse(kVerbs, v); }
std::string_view to_string(StateKind v) { return reverse(kStateKinds, v); }
std::string_view to_string(EffectKind v) { return reverse(kEffectKinds, v); }
std::string_view to_string(BehaviorKind v) { return reverse(kBehaviorKinds, v); }
std::string_view to_string(IdKind v) { return reverse(kIdKinds, v); }

std::optional<ScenarioMode> mode_from_string(std::string_view s) { return lookup(kModes, s); }
std::optional<Controller> controller_from_string(std::string_view s) {
  return lookup(kControllers, s);
}
std::optional<Placeholder> placeholder_from_string(std::string_view s) {
  return lookup(kPlaceholders, s);
}
std::optional<Verb> verb_from_string(std::string_view s) { return lookup(kVerbs, s); }
std::optional<StateKind> state_kind_from_string(std::string_view s) {
  return lookup(kStateKinds, s);
}
std::optional<BehaviorKind> behavior_kind_from_string(std::string_view s) {
  return lookup(kBehaviorKinds, s);
}

}  // namespace scengen
