#include "scengen/interchange.hpp"

#include "detail/json_read.hpp"

namespace scengen {

namespace {

using detail::child;
using detail::ojson;
using R = detail::Reader<InterchangeError>;

template <typename T>
ojson opt(const std::optional<T>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

ojson pos_json(const std::optional<GridPos>& p) {
  if (!p) return nullptr;
  return ojson{{"x", p->x}, {"y", p->y}};
}

ojson action_json(const ActionSpec& a) {
  return ojson{{"name", a.name}, {"target", opt(a.target)}, {"dialogue", opt(a.dialogue)}};
}

ojson actions_json(const std::vector<ActionSpec>& list) {
  ojson out = ojson::array();
  for (const auto& a : list) out.push_back(action_json(a));
  return out;
}

std::optional<GridPos> read_pos(const ojson& obj, const std::string& path) {
  const ojson& v = R::field(obj, "position", path);
  const std::string p = child(path, "position");
  if (v.is_null()) return std::nullopt;
  GridPos pos{R::int32(R::field(v, "x", p), child(p, "x")),
              R::int32(R::field(v, "y", p), child(p, "y"))};
  if (!pos.valid()) throw InterchangeError("position outside the grid", p);
  return pos;
}

ActionSpec read_action(const ojson& v, const std::string& path) {
  ActionSpec a;
  a.name = R::str(R::field(v, "name", path), child(path, "name"));
  a.target = R::opt_str(v, "target", path);
  a.dialogue = R::opt_str(v, "dialogue", path);
  return a;
}

std::vector<ActionSpec> read_actions(const ojson& v, const std::string& path) {
  std::vector<ActionSpec> out;
  R::array(v, path);
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(read_action(v[i], child(path, i)));
  return out;
}

template <typename Fn>
void each(const ojson& root, std::string_view key, Fn fn) {
  const std::string path = "/" + std::string(key);
  const ojson& arr = R::array(R::field(root, key, ""), path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    R::object(arr[i], child(path, i));
    fn(arr[i], child(path, i));
  }
}

}  // namespace

std::string to_interchange(const ScenarioDoc& doc) {
  ojson root;
  root["name"] = doc.name;
  root["mode"] = to_string(doc.mode);

  ojson roles = ojson::array();
  for (const auto& r : doc.roles) {
    ojson b = nullptr;
    if (r.behavior) {
      b = ojson{{"kind", to_string(r.behavior->kind)},
                {"script", actions_json(r.behavior->script)},
                {"target", opt(r.behavior->target)},
                {"priorities", actions_json(r.behavior->priorities)},
                {"attack_damage", r.behavior->attack_damage}};
    }
    roles.push_back(ojson{{"name", r.name},
                          {"controller", to_string(r.controller)},
                          {"health", r.health},
                          {"position", pos_json(r.position)},
                          {"behavior", b}});
  }
  root["roles"] = roles;

  ojson entities = ojson::array();
  for (const auto& e : doc.entities) {
    ojson verbs = ojson::array();
    for (Verb v : e.verbs) verbs.push_back(to_string(v));
    entities.push_back(ojson{{"name", e.name},
                             {"tag", e.tag},
                             {"placeholder", to_string(e.placeholder)},
                             {"position", pos_json(e.position)},
                             {"verbs", verbs}});
  }
  root["entities"] = entities;

  ojson states = ojson::array();
  for (const auto& s : doc.states) {
    states.push_back(ojson{{"name", s.name},
                           {"kind", to_string(s.kind)},
                           {"description", s.description},
                           {"on_enter_feedback", opt(s.on_enter_feedback)}});
  }
  root["states"] = states;

  ojson transitions = ojson::array();
  for (const auto& t : doc.transitions) {
    ojson effects = ojson::array();
    for (const auto& fx : t.effects) {
      effects.push_back(
          ojson{{"kind", to_string(fx.kind)}, {"delta", fx.delta}, {"subject", opt(fx.subject)}});
    }
    transitions.push_back(ojson{{"from", t.from},
                                {"to", t.to},
                                {"action", action_json(t.action)},
                                {"actor", t.actor},
                                {"effects", effects},
                                {"feedback", opt(t.feedback)}});
  }
  root["transitions"] = transitions;

  ojson goals = ojson::array();
  for (const auto& g : doc.goals) goals.push_back(ojson{{"kind", "reach"}, {"state", g.state}});
  root["goals"] = goals;

  ojson meta = ojson::object();
  for (const auto& [k, v] : doc.metadata) meta[k] = v;
  root["metadata"] = meta;
  return root.dump(2) + "\n";
}

ScenarioDoc from_interchange(std::string_view text) {
  bool ok = false;
  const ojson root = detail::parse_json_text(text, ok);
  if (!ok) throw InterchangeError("text is not valid JSON", "/");
  R::object(root, "");

  ScenarioDoc doc;
  doc.name = R::str(R::field(root, "name", ""), "/name");
  doc.mode = R::enumeration<ScenarioMode>(R::field(root, "mode", ""), "/mode", mode_from_string);

  each(root, "roles", [&](const ojson& v, const std::string& path) {
    Role r;
    r.name = R::str(R::field(v, "name", path), child(path, "name"));
    r.controller = R::enumeration<Controller>(R::field(v, "controller", path),
                                              child(path, "controller"), controller_from_string);
    r.health = R::int32(R::field(v, "health", path), child(path, "health"));
    if (r.health < 0) throw InterchangeError("health must be >= 0", child(path, "health"));
    r.position = read_pos(v, path);
    const ojson& b = R::field(v, "behavior", path);
    if (!b.is_null()) {
      const std::string bp = child(path, "behavior");
      R::object(b, bp);
      BehaviorSpec spec;
      spec.kind = R::enumeration<BehaviorKind>(R::field(b, "kind", bp), child(bp, "kind"),
                                               behavior_kind_from_string);
      spec.script = read_actions(R::field(b, "script", bp), child(bp, "script"));
      spec.target = R::opt_str(b, "target", bp);
      spec.priorities = read_actions(R::field(b, "priorities", bp), child(bp, "priorities"));
      spec.attack_damage = R::int32(R::field(b, "attack_damage", bp), child(bp, "attack_damage"));
      r.behavior = std::move(spec);
    }
    doc.roles.push_back(std::move(r));
  });

  each(root, "entities", [&](const ojson& v, const std::string& path) {
    Entity e;
    e.name = R::str(R::field(v, "name", path), child(path, "name"));
    e.tag = R::str(R::field(v, "tag", path), child(path, "tag"));
    e.placeholder = R::enumeration<Placeholder>(R::field(v, "placeholder", path),
                                                child(path, "placeholder"), placeholder_from_string);
    e.position = read_pos(v, path);
    const std::string vp = child(path, "verbs");
    const ojson& verbs = R::array(R::field(v, "verbs", path), vp);
    for (std::size_t i = 0; i < verbs.size(); ++i) {
      e.verbs.insert(R::enumeration<Verb>(verbs[i], child(vp, i), verb_from_string));
    }
    doc.entities.push_back(std::move(e));
  });

  each(root, "states", [&](const ojson& v, const std::string& path) {
    StateNode s;
    s.name = R::str(R::field(v, "name", path), child(path, "name"));
    s.kind = R::enumeration<StateKind>(R::field(v, "kind", path), child(path, "kind"),
                                       state_kind_from_string);
    s.description = R::str(R::field(v, "description", path), child(path, "description"));
    s.on_enter_feedback = R::opt_str(v, "on_enter_feedback", path);
    doc.states.push_back(std::move(s));
  });

  each(root, "transitions", [&](const ojson& v, const std::string& path) {
    TransitionRule t;
    t.from = R::str(R::field(v, "from", path), child(path, "from"));
    t.to = R::str(R::field(v, "to", path), child(path, "to"));
    const std::string ap = child(path, "action");
    t.action = read_action(R::object(R::field(v, "action", path), ap), ap);
    t.actor = R::str(R::field(v, "actor", path), child(path, "actor"));
    const std::string ep = child(path, "effects");
    const ojson& effects = R::array(R::field(v, "effects", path), ep);
    for (std::size_t i = 0; i < effects.size(); ++i) {
      const std::string fp = child(ep, i);
      R::object(effects[i], fp);
      ScoreEffect fx;
      fx.kind = R::enumeration<EffectKind>(R::field(effects[i], "kind", fp), child(fp, "kind"),
                                           [](std::string_view s) -> std::optional<EffectKind> {
                                             if (s == "score") return EffectKind::Score;
                                             if (s == "health") return EffectKind::Health;
                                             return std::nullopt;
                                           });
      fx.delta = R::int32(R::field(effects[i], "delta", fp), child(fp, "delta"));
      fx.subject = R::opt_str(effects[i], "subject", fp);
      t.effects.push_back(std::move(fx));
    }
    t.feedback = R::opt_str(v, "feedback", path);
    doc.transitions.push_back(std::move(t));
  });

  each(root, "goals", [&](const ojson& v, const std::string& path) {
    const std::string kind = R::str(R::field(v, "kind", path), child(path, "kind"));
    if (kind != "reach") throw InterchangeError("unknown goal kind '" + kind + "'", child(path, "kind"));
    doc.goals.push_back({GoalKind::Reach, R::str(R::field(v, "state", path), child(path, "state"))});
  });

  const ojson& meta = R::object(R::field(root, "metadata", ""), "/metadata");
  for (auto it = meta.begin(); it != meta.end(); ++it) {
    doc.metadata[it.key()] = R::str(it.value(), child("/metadata", it.key()));
  }
  return doc;
}

}  // namespace scengen
