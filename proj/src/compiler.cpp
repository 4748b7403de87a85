#include "scengen/compiler.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "detail/json_read.hpp"

namespace scengen {

namespace {

using detail::child;
using detail::ojson;
using R = detail::Reader<BundleError>;

template <typename T>
std::optional<std::size_t> index_of(const std::vector<T>& items, std::string_view name) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

UiConfig ui_from_metadata(const std::map<std::string, std::string>& meta) {
  UiConfig ui;
  auto flag = [&](const char* key, bool& out) {
    auto it = meta.find(key);
    if (it == meta.end()) return;
    if (it->second != "true" && it->second != "false") {
      throw InvalidScenario(std::string("metadata ") + key + " must be true or false");
    }
    out = it->second == "true";
  };
  auto number = [&](const char* key, int& out, int min) {
    auto it = meta.find(key);
    if (it == meta.end()) return;
    auto v = parse_int(it->second);
    if (!v || *v < min) throw InvalidScenario(std::string("metadata ") + key + " is not a valid integer");
    out = *v;
  };
  flag("ui_show_score", ui.show_score);
  flag("ui_show_health", ui.show_health);
  number("ui_feedback_log_depth", ui.feedback_log_depth, 1);
  number("ui_initial_score", ui.initial_score, std::numeric_limits<int>::min());
  return ui;
}

// ---- bundle JSON -------------------------------------------------------------

template <typename T>
ojson opt(const std::optional<T>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

ojson pos_json(const std::optional<GridPos>& p) {
  if (!p) return nullptr;
  return ojson{{"x", p->x}, {"y", p->y}};
}

ojson actions_json(const std::vector<ActionSpec>& list) {
  ojson out = ojson::array();
  for (const auto& a : list) {
    out.push_back(ojson{{"name", a.name}, {"target", opt(a.target)}, {"dialogue", opt(a.dialogue)}});
  }
  return out;
}

std::optional<GridPos> read_pos(const ojson& obj, const std::string& path) {
  const ojson& v = R::field(obj, "position", path);
  if (v.is_null()) return std::nullopt;
  const std::string p = child(path, "position");
  GridPos pos{R::int32(R::field(v, "x", p), child(p, "x")), R::int32(R::field(v, "y", p), child(p, "y"))};
  if (!pos.valid()) throw BundleError("position outside the grid", p);
  return pos;
}

std::vector<ActionSpec> read_actions(const ojson& v, const std::string& path) {
  R::array(v, path);
  std::vector<ActionSpec> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = child(path, i);
    out.push_back({R::str(R::field(v[i], "name", p), child(p, "name")), R::opt_str(v[i], "target", p),
                   R::opt_str(v[i], "dialogue", p)});
  }
  return out;
}

std::size_t checked_index(const ojson& v, const std::string& path, std::size_t bound) {
  const std::size_t i = R::index(v, path);
  if (i >= bound) throw BundleError("index out of range", path);
  return i;
}

template <typename Fn>
void each(const ojson& root, std::string_view key, Fn fn) {
  const std::string path = "/" + std::string(key);
  const ojson& arr = R::array(R::field(root, key, ""), path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    R::object(arr[i], child(path, i));
    fn(arr[i], child(path, i), i);
  }
}

void expect_dense(std::size_t got, std::size_t want, const std::string& path) {
  if (got != want) throw BundleError("index must equal position " + std::to_string(want), path);
}

std::string describe(const GameDefinition& d, const CompiledTransition& t) {
  auto name = [&](std::size_t i) { return i < d.states.size() ? d.states[i].name : "?"; };
  std::string s = "transition #" + std::to_string(t.index) + " (" + name(t.from) + " -" + t.action;
  if (t.target) s += "(" + *t.target + ")";
  return s + "-> " + name(t.to) + ")";
}

template <typename T>
std::string show(const T& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}
std::string show(const std::optional<std::string>& v) { return v ? "'" + *v + "'" : "none"; }
std::string show(const std::string& v) { return "'" + v + "'"; }
std::string show(bool v) { return v ? "true" : "false"; }

struct FieldDiff {
  std::vector<std::string> parts;
  template <typename T>
  void cmp(std::string_view field, const T& a, const T& b) {
    if (!(a == b)) parts.push_back(std::string(field) + " " + show(a) + " vs " + show(b));
  }
  void flag(std::string_view field, bool differs) {
    if (differs) parts.push_back(std::string(field) + " differs");
  }
  std::string joined() const {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "; " : "") + parts[i];
    return out;
  }
};

AssetBinding without_pack(AssetBinding b) {
  if (auto* ref = std::get_if<AssetRef>(&b.resolved)) ref->pack.clear();
  return b;
}

GameDefinition build(const ScenarioDoc& input, const AssetCatalog& catalog) {
  const ScenarioDoc doc = normalize(input);
  if (auto v = structural_violations(doc); !v.empty()) {
    std::string msg = "scenario '" + doc.name + "' is not well-formed:";
    for (const auto& s : v) msg += "\n  " + s;
    throw InvalidScenario(msg);
  }

  GameDefinition def;
  def.scenario_name = doc.name;
  def.ui = ui_from_metadata(doc.metadata);

  // Entry pinned to index 0, the rest in normalized (name) order.
  std::vector<const StateNode*> order;
  for (const auto& s : doc.states) {
    if (s.kind == StateKind::Entry && order.empty()) order.push_back(&s);
  }
  for (const auto& s : doc.states) {
    if (order.empty() || &s != order.front()) order.push_back(&s);
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    const StateNode& s = *order[i];
    def.states.push_back({i, s.name, s.kind, s.description, s.on_enter_feedback});
  }
  for (std::size_t i = 0; i < doc.roles.size(); ++i) {
    const Role& r = doc.roles[i];
    def.roles.push_back({i, r.name, r.controller, r.health, r.position});
    if (r.controller == Controller::Player) def.player_index = i;
  }
  for (std::size_t i = 0; i < doc.entities.size(); ++i) {
    const Entity& e = doc.entities[i];
    def.entities.push_back({i, e.name, e.tag, e.placeholder, e.position, e.verbs});
  }

  for (std::size_t i = 0; i < doc.transitions.size(); ++i) {
    const TransitionRule& t = doc.transitions[i];
    CompiledTransition ct;
    ct.index = i;
    ct.from = *def.state_index(t.from);
    ct.to = *def.state_index(t.to);
    ct.action = t.action.name;
    ct.target = t.action.target;
    ct.actor = *def.role_index(t.actor);
    for (const auto& fx : t.effects) {
      if (fx.kind == EffectKind::Score) {
        ct.score_delta += fx.delta;
      } else {
        ct.health_deltas.push_back({*def.role_index(*fx.subject), fx.delta});
      }
    }
    ct.feedback = t.feedback;
    ct.dialogue = t.action.dialogue;
    def.action_table.emplace(ActionKey{ct.from, ct.action, ct.target}, i);
    def.transitions.push_back(std::move(ct));
  }

  def.bindings = bind_assets(doc, catalog).bindings;

  for (std::size_t i = 0; i < doc.roles.size(); ++i) {
    const Role& r = doc.roles[i];
    if (r.controller == Controller::Npc && r.behavior) def.npc_table.push_back({i, *r.behavior, r.position});
  }

  const auto unreachable = check_reachability(doc);
  std::optional<std::size_t> exit;
  for (const auto& g : doc.goals) {
    if (!unreachable.count(g.state)) {
      exit = def.state_index(g.state);
      break;
    }
  }
  for (const auto& s : def.states) {
    if (exit) break;
    if (s.kind == StateKind::Exit && !unreachable.count(s.name)) exit = s.index;
  }
  for (const auto& s : def.states) {
    if (exit) break;
    if (s.kind == StateKind::Exit) exit = s.index;
  }
  def.exit_index = exit.value_or(def.entry_index);
  for (const auto& name : progress_chain(doc)) def.progress_chain.push_back(*def.state_index(name));
  return def;
}

}  // namespace

const CompiledTransition* GameDefinition::dispatch(std::size_t state, std::string_view action,
                                                   const std::optional<std::string>& target) const {
  auto it = action_table.find(ActionKey{state, std::string(action), target});
  return it == action_table.end() ? nullptr : &transitions[it->second];
}

std::optional<std::size_t> GameDefinition::role_index(std::string_view name) const {
  return index_of(roles, name);
}
std::optional<std::size_t> GameDefinition::entity_index(std::string_view name) const {
  return index_of(entities, name);
}
std::optional<std::size_t> GameDefinition::state_index(std::string_view name) const {
  return index_of(states, name);
}

RejectedScenario::RejectedScenario(DiagnosticReport report)
    : Error("scenario rejected: " + std::to_string(report.error_count()) + " error(s)\n" +
            format_report(report)),
      report_(std::move(report)) {}

GameDefinition compile(const ScenarioDoc& doc, const AssetCatalog& catalog) {
  DiagnosticReport report = validate(doc);
  if (!report.ok) throw RejectedScenario(std::move(report));
  return build(doc, catalog);
}

GameDefinition compile_unchecked(const ScenarioDoc& doc, const AssetCatalog& catalog) {
  return build(doc, catalog);
}

std::string emit_bundle(const GameDefinition& def) {
  ojson root;
  root["format"] = "scengen-bundle";
  root["version"] = def.version;
  root["scenario_name"] = def.scenario_name;
  root["entry_index"] = def.entry_index;
  root["exit_index"] = def.exit_index;
  root["player_index"] = def.player_index;
  root["progress_chain"] = def.progress_chain;
  root["ui"] = ojson{{"show_score", def.ui.show_score},
                     {"show_health", def.ui.show_health},
                     {"feedback_log_depth", def.ui.feedback_log_depth},
                     {"initial_score", def.ui.initial_score}};

  ojson states = ojson::array();
  for (const auto& s : def.states) {
    states.push_back(ojson{{"index", s.index},
                           {"name", s.name},
                           {"kind", to_string(s.kind)},
                           {"description", s.description},
                           {"on_enter_feedback", opt(s.on_enter_feedback)}});
  }
  root["states"] = states;

  ojson roles = ojson::array();
  for (const auto& r : def.roles) {
    roles.push_back(ojson{{"index", r.index},
                          {"name", r.name},
                          {"controller", to_string(r.controller)},
                          {"health", r.health},
                          {"position", pos_json(r.position)}});
  }
  root["roles"] = roles;

  ojson entities = ojson::array();
  for (const auto& e : def.entities) {
    ojson verbs = ojson::array();
    for (Verb v : e.verbs) verbs.push_back(to_string(v));
    entities.push_back(ojson{{"index", e.index},
                             {"name", e.name},
                             {"tag", e.tag},
                             {"placeholder", to_string(e.placeholder)},
                             {"position", pos_json(e.position)},
                             {"verbs", verbs}});
  }
  root["entities"] = entities;

  ojson transitions = ojson::array();
  for (const auto& t : def.transitions) {
    ojson health = ojson::array();
    for (const auto& h : t.health_deltas) health.push_back(ojson{{"role", h.role}, {"delta", h.delta}});
    transitions.push_back(ojson{{"index", t.index},
                                {"from", t.from},
                                {"to", t.to},
                                {"action", t.action},
                                {"target", opt(t.target)},
                                {"actor", t.actor},
                                {"score_delta", t.score_delta},
                                {"health_deltas", health},
                                {"feedback", opt(t.feedback)},
                                {"dialogue", opt(t.dialogue)}});
  }
  root["transitions"] = transitions;

  ojson table = ojson::array();
  for (const auto& [key, idx] : def.action_table) {
    table.push_back(ojson{
        {"state", key.state}, {"action", key.action}, {"target", opt(key.target)}, {"transition", idx}});
  }
  root["action_table"] = table;

  ojson npcs = ojson::array();
  for (const auto& n : def.npc_table) {
    const auto& b = n.behavior;
    npcs.push_back(ojson{{"role", n.role},
                         {"behavior",
                          ojson{{"kind", to_string(b.kind)},
                                {"script", actions_json(b.script)},
                                {"target", opt(b.target)},
                                {"priorities", actions_json(b.priorities)},
                                {"attack_damage", b.attack_damage}}},
                         {"position", pos_json(n.position)}});
  }
  root["npcs"] = npcs;

  ojson bindings = ojson::array();
  for (const auto& b : def.bindings) {
    if (const auto* ref = std::get_if<AssetRef>(&b.resolved)) {
      bindings.push_back(ojson{{"entity", b.entity},
                               {"kind", "asset"},
                               {"asset_id", ref->asset_id},
                               {"pack", ref->pack},
                               {"display_name", ref->display_name}});
    } else {
      bindings.push_back(ojson{{"entity", b.entity},
                               {"kind", "placeholder"},
                               {"shape", to_string(std::get<Placeholder>(b.resolved))}});
    }
  }
  root["bindings"] = bindings;
  return root.dump(2) + "\n";
}

GameDefinition load_bundle(std::string_view text) {
  bool ok = false;
  const ojson root = detail::parse_json_text(text, ok);
  if (!ok) throw BundleError("text is not valid JSON", "/");
  R::object(root, "");
  if (R::str(R::field(root, "format", ""), "/format") != "scengen-bundle") {
    throw BundleError("not a scengen bundle", "/format");
  }
  GameDefinition def;
  def.version = R::str(R::field(root, "version", ""), "/version");
  if (def.version != kBundleVersion) throw VersionError(def.version);
  def.scenario_name = R::str(R::field(root, "scenario_name", ""), "/scenario_name");

  const ojson& ui = R::object(R::field(root, "ui", ""), "/ui");
  def.ui.show_score = R::boolean(R::field(ui, "show_score", "/ui"), "/ui/show_score");
  def.ui.show_health = R::boolean(R::field(ui, "show_health", "/ui"), "/ui/show_health");
  def.ui.feedback_log_depth =
      R::int32(R::field(ui, "feedback_log_depth", "/ui"), "/ui/feedback_log_depth");
  if (def.ui.feedback_log_depth < 1) throw BundleError("must be >= 1", "/ui/feedback_log_depth");
  def.ui.initial_score = R::int32(R::field(ui, "initial_score", "/ui"), "/ui/initial_score");

  each(root, "states", [&](const ojson& v, const std::string& p, std::size_t i) {
    CompiledState s;
    s.index = R::index(R::field(v, "index", p), child(p, "index"));
    expect_dense(s.index, i, child(p, "index"));
    s.name = R::str(R::field(v, "name", p), child(p, "name"));
    s.kind = R::enumeration<StateKind>(R::field(v, "kind", p), child(p, "kind"), state_kind_from_string);
    s.description = R::str(R::field(v, "description", p), child(p, "description"));
    s.on_enter_feedback = R::opt_str(v, "on_enter_feedback", p);
    def.states.push_back(std::move(s));
  });
  if (def.states.empty()) throw BundleError("at least one state required", "/states");

  each(root, "roles", [&](const ojson& v, const std::string& p, std::size_t i) {
    CompiledRole r;
    r.index = R::index(R::field(v, "index", p), child(p, "index"));
    expect_dense(r.index, i, child(p, "index"));
    r.name = R::str(R::field(v, "name", p), child(p, "name"));
    r.controller =
        R::enumeration<Controller>(R::field(v, "controller", p), child(p, "controller"), controller_from_string);
    r.health = R::int32(R::field(v, "health", p), child(p, "health"));
    if (r.health < 0) throw BundleError("health must be >= 0", child(p, "health"));
    r.position = read_pos(v, p);
    def.roles.push_back(std::move(r));
  });
  if (def.roles.empty()) throw BundleError("at least one role required", "/roles");

  each(root, "entities", [&](const ojson& v, const std::string& p, std::size_t i) {
    CompiledEntity e;
    e.index = R::index(R::field(v, "index", p), child(p, "index"));
    expect_dense(e.index, i, child(p, "index"));
    e.name = R::str(R::field(v, "name", p), child(p, "name"));
    e.tag = R::str(R::field(v, "tag", p), child(p, "tag"));
    e.placeholder = R::enumeration<Placeholder>(R::field(v, "placeholder", p), child(p, "placeholder"),
                                                placeholder_from_string);
    e.position = read_pos(v, p);
    const std::string vp = child(p, "verbs");
    const ojson& verbs = R::array(R::field(v, "verbs", p), vp);
    for (std::size_t k = 0; k < verbs.size(); ++k) {
      e.verbs.insert(R::enumeration<Verb>(verbs[k], child(vp, k), verb_from_string));
    }
    def.entities.push_back(std::move(e));
  });

  const std::size_t n_states = def.states.size();
  const std::size_t n_roles = def.roles.size();
  each(root, "transitions", [&](const ojson& v, const std::string& p, std::size_t i) {
    CompiledTransition t;
    t.index = R::index(R::field(v, "index", p), child(p, "index"));
    expect_dense(t.index, i, child(p, "index"));
    t.from = checked_index(R::field(v, "from", p), child(p, "from"), n_states);
    t.to = checked_index(R::field(v, "to", p), child(p, "to"), n_states);
    t.action = R::str(R::field(v, "action", p), child(p, "action"));
    t.target = R::opt_str(v, "target", p);
    t.actor = checked_index(R::field(v, "actor", p), child(p, "actor"), n_roles);
    t.score_delta = R::int32(R::field(v, "score_delta", p), child(p, "score_delta"));
    const std::string hp = child(p, "health_deltas");
    const ojson& health = R::array(R::field(v, "health_deltas", p), hp);
    for (std::size_t k = 0; k < health.size(); ++k) {
      const std::string q = child(hp, k);
      t.health_deltas.push_back({checked_index(R::field(health[k], "role", q), child(q, "role"), n_roles),
                                 R::int32(R::field(health[k], "delta", q), child(q, "delta"))});
    }
    t.feedback = R::opt_str(v, "feedback", p);
    t.dialogue = R::opt_str(v, "dialogue", p);
    def.transitions.push_back(std::move(t));
  });

  each(root, "action_table", [&](const ojson& v, const std::string& p, std::size_t) {
    ActionKey key;
    key.state = checked_index(R::field(v, "state", p), child(p, "state"), n_states);
    key.action = R::str(R::field(v, "action", p), child(p, "action"));
    key.target = R::opt_str(v, "target", p);
    const std::size_t idx =
        checked_index(R::field(v, "transition", p), child(p, "transition"), def.transitions.size());
    if (!def.action_table.emplace(std::move(key), idx).second) {
      throw BundleError("duplicate dispatch key", p);
    }
  });

  each(root, "npcs", [&](const ojson& v, const std::string& p, std::size_t) {
    CompiledNpc n;
    n.role = checked_index(R::field(v, "role", p), child(p, "role"), n_roles);
    const std::string bp = child(p, "behavior");
    const ojson& b = R::object(R::field(v, "behavior", p), bp);
    n.behavior.kind =
        R::enumeration<BehaviorKind>(R::field(b, "kind", bp), child(bp, "kind"), behavior_kind_from_string);
    n.behavior.script = read_actions(R::field(b, "script", bp), child(bp, "script"));
    n.behavior.target = R::opt_str(b, "target", bp);
    n.behavior.priorities = read_actions(R::field(b, "priorities", bp), child(bp, "priorities"));
    n.behavior.attack_damage = R::int32(R::field(b, "attack_damage", bp), child(bp, "attack_damage"));
    n.position = read_pos(v, p);
    def.npc_table.push_back(std::move(n));
  });

  each(root, "bindings", [&](const ojson& v, const std::string& p, std::size_t) {
    AssetBinding b;
    b.entity = R::str(R::field(v, "entity", p), child(p, "entity"));
    const std::string kind = R::str(R::field(v, "kind", p), child(p, "kind"));
    if (kind == "asset") {
      b.resolved = AssetRef{R::str(R::field(v, "asset_id", p), child(p, "asset_id")),
                            R::str(R::field(v, "pack", p), child(p, "pack")),
                            R::str(R::field(v, "display_name", p), child(p, "display_name"))};
    } else if (kind == "placeholder") {
      b.resolved = R::enumeration<Placeholder>(R::field(v, "shape", p), child(p, "shape"),
                                               placeholder_from_string);
    } else {
      throw BundleError("unknown binding kind '" + kind + "'", child(p, "kind"));
    }
    def.bindings.push_back(std::move(b));
  });

  def.entry_index = checked_index(R::field(root, "entry_index", ""), "/entry_index", n_states);
  def.exit_index = checked_index(R::field(root, "exit_index", ""), "/exit_index", n_states);
  def.player_index = checked_index(R::field(root, "player_index", ""), "/player_index", n_roles);
  const ojson& chain = R::array(R::field(root, "progress_chain", ""), "/progress_chain");
  for (std::size_t i = 0; i < chain.size(); ++i) {
    def.progress_chain.push_back(checked_index(chain[i], child("/progress_chain", i), n_states));
  }
  return def;
}

std::vector<std::string> diff_definitions(const GameDefinition& a, const GameDefinition& b) {
  std::vector<std::string> out;
  auto top = [&](std::string_view field, const auto& x, const auto& y) {
    if (!(x == y)) out.push_back(std::string(field) + ": " + show(x) + " vs " + show(y));
  };
  top("version", a.version, b.version);
  top("scenario_name", a.scenario_name, b.scenario_name);
  top("entry_index", a.entry_index, b.entry_index);
  top("exit_index", a.exit_index, b.exit_index);
  top("player_index", a.player_index, b.player_index);
  if (a.progress_chain != b.progress_chain) out.push_back("progress_chain differs");

  FieldDiff ui;
  ui.cmp("show_score", a.ui.show_score, b.ui.show_score);
  ui.cmp("show_health", a.ui.show_health, b.ui.show_health);
  ui.cmp("feedback_log_depth", a.ui.feedback_log_depth, b.ui.feedback_log_depth);
  ui.cmp("initial_score", a.ui.initial_score, b.ui.initial_score);
  if (!ui.parts.empty()) out.push_back("ui: " + ui.joined());

  auto sized = [&](std::string_view what, std::size_t x, std::size_t y) {
    if (x != y) out.push_back(std::string(what) + " count: " + std::to_string(x) + " vs " + std::to_string(y));
  };

  sized("state", a.states.size(), b.states.size());
  for (std::size_t i = 0; i < std::min(a.states.size(), b.states.size()); ++i) {
    const auto& x = a.states[i];
    const auto& y = b.states[i];
    FieldDiff d;
    d.cmp("name", x.name, y.name);
    d.flag("kind", x.kind != y.kind);
    d.cmp("description", x.description, y.description);
    d.cmp("on_enter_feedback", x.on_enter_feedback, y.on_enter_feedback);
    if (!d.parts.empty()) out.push_back("state #" + std::to_string(i) + " (" + x.name + "): " + d.joined());
  }

  sized("role", a.roles.size(), b.roles.size());
  for (std::size_t i = 0; i < std::min(a.roles.size(), b.roles.size()); ++i) {
    const auto& x = a.roles[i];
    const auto& y = b.roles[i];
    FieldDiff d;
    d.cmp("name", x.name, y.name);
    d.flag("controller", x.controller != y.controller);
    d.cmp("health", x.health, y.health);
    d.flag("position", x.position != y.position);
    if (!d.parts.empty()) out.push_back("role #" + std::to_string(i) + " (" + x.name + "): " + d.joined());
  }

  sized("entity", a.entities.size(), b.entities.size());
  for (std::size_t i = 0; i < std::min(a.entities.size(), b.entities.size()); ++i) {
    if (!(a.entities[i] == b.entities[i])) {
      out.push_back("entity #" + std::to_string(i) + " (" + a.entities[i].name + ") differs");
    }
  }

  sized("transition", a.transitions.size(), b.transitions.size());
  for (std::size_t i = 0; i < std::min(a.transitions.size(), b.transitions.size()); ++i) {
    const auto& x = a.transitions[i];
    const auto& y = b.transitions[i];
    FieldDiff d;
    d.cmp("from", x.from, y.from);
    d.cmp("to", x.to, y.to);
    d.cmp("action", x.action, y.action);
    d.cmp("target", x.target, y.target);
    d.cmp("actor", x.actor, y.actor);
    d.cmp("score_delta", x.score_delta, y.score_delta);
    d.flag("health_deltas", x.health_deltas != y.health_deltas);
    d.cmp("feedback", x.feedback, y.feedback);
    d.cmp("dialogue", x.dialogue, y.dialogue);
    if (!d.parts.empty()) out.push_back(describe(a, x) + ": " + d.joined());
  }

  for (const auto& [key, idx] : a.action_table) {
    auto it = b.action_table.find(key);
    std::string k = "action_table[" + std::to_string(key.state) + ", " + key.action +
                    (key.target ? ", " + *key.target : "") + "]";
    if (it == b.action_table.end()) {
      out.push_back(k + ": only in first definition");
    } else if (it->second != idx) {
      out.push_back(k + ": transition " + std::to_string(idx) + " vs " + std::to_string(it->second));
    }
  }
  for (const auto& [key, idx] : b.action_table) {
    if (!a.action_table.count(key)) {
      out.push_back("action_table[" + std::to_string(key.state) + ", " + key.action +
                    (key.target ? ", " + *key.target : "") + "]: only in second definition");
    }
  }

  sized("npc", a.npc_table.size(), b.npc_table.size());
  for (std::size_t i = 0; i < std::min(a.npc_table.size(), b.npc_table.size()); ++i) {
    if (!(a.npc_table[i] == b.npc_table[i])) {
      out.push_back("npc #" + std::to_string(i) + " (role " + std::to_string(a.npc_table[i].role) + ") differs");
    }
  }

  sized("binding", a.bindings.size(), b.bindings.size());
  for (std::size_t i = 0; i < std::min(a.bindings.size(), b.bindings.size()); ++i) {
    if (!(without_pack(a.bindings[i]) == without_pack(b.bindings[i]))) {
      out.push_back("binding for entity '" + a.bindings[i].entity + "' differs");
    }
  }
  return out;
}

}  // namespace scengen
