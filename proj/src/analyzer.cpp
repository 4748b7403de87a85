#include "scengen/analyzer.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "detail/json_read.hpp"

namespace scengen {

namespace {

/// Adjacency view of the transition graph over doc.states indices.
struct Graph {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::vector<std::size_t>> in;

  explicit Graph(const ScenarioDoc& doc) : out(doc.states.size()), in(doc.states.size()) {
    std::unordered_map<std::string_view, std::size_t> index;
    for (std::size_t i = 0; i < doc.states.size(); ++i) index.emplace(doc.states[i].name, i);
    for (const auto& t : doc.transitions) {
      auto f = index.find(t.from);
      auto g = index.find(t.to);
      if (f == index.end() || g == index.end()) continue;
      out[f->second].push_back(g->second);
      in[g->second].push_back(f->second);
    }
  }

  std::size_t size() const { return out.size(); }
};

std::vector<bool> bfs(const std::vector<std::vector<std::size_t>>& adj,
                      const std::vector<std::size_t>& seeds,
                      std::optional<std::size_t> blocked = std::nullopt) {
  std::vector<bool> seen(adj.size(), false);
  std::deque<std::size_t> queue;
  for (std::size_t s : seeds) {
    if (s == blocked || seen[s]) continue;
    seen[s] = true;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : adj[u]) {
      if (seen[v] || v == blocked) continue;
      seen[v] = true;
      queue.push_back(v);
    }
  }
  return seen;
}

std::vector<std::size_t> states_of_kind(const ScenarioDoc& doc, StateKind kind) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < doc.states.size(); ++i) {
    if (doc.states[i].kind == kind) out.push_back(i);
  }
  return out;
}

/// Tarjan SCC restricted to nodes with include[v]; returns component id per
/// node (npos for excluded nodes).
std::vector<std::size_t> strongly_connected(const Graph& g, const std::vector<bool>& include,
                                            std::size_t& count) {
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> comp(g.size(), npos), low(g.size(), 0), order(g.size(), npos);
  std::vector<bool> on_stack(g.size(), false);
  std::vector<std::size_t> stack;
  std::size_t counter = 0;
  count = 0;

  std::function<void(std::size_t)> visit = [&](std::size_t u) {
    order[u] = low[u] = counter++;
    stack.push_back(u);
    on_stack[u] = true;
    for (std::size_t v : g.out[u]) {
      if (!include[v]) continue;
      if (order[v] == npos) {
        visit(v);
        low[u] = std::min(low[u], low[v]);
      } else if (on_stack[v]) {
        low[u] = std::min(low[u], order[v]);
      }
    }
    if (low[u] == order[u]) {
      for (;;) {
        const std::size_t w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = count;
        if (w == u) break;
      }
      ++count;
    }
  };
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (include[v] && order[v] == npos) visit(v);
  }
  return comp;
}

std::string join(const std::vector<std::string>& names, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += sep;
    out += names[i];
  }
  return out;
}

void sort_diagnostics(std::vector<Diagnostic>& d) {
  std::sort(d.begin(), d.end(), [](const Diagnostic& a, const Diagnostic& b) {
    return std::tie(a.severity, a.code, a.subject, a.message) <
           std::tie(b.severity, b.code, b.subject, b.message);
  });
}

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  return out;
}

struct LinearityFacts {
  std::vector<bool> reachable;
  std::vector<std::size_t> reachable_exits;
  std::vector<bool> doomed;
  std::size_t entry = 0;
  bool single_entry = false;
};

LinearityFacts linearity_facts(const ScenarioDoc& doc, const Graph& g) {
  LinearityFacts f;
  const auto entries = states_of_kind(doc, StateKind::Entry);
  f.single_entry = entries.size() == 1;
  if (!f.single_entry) return f;
  f.entry = entries.front();
  f.reachable = bfs(g.out, entries);
  const auto exits = states_of_kind(doc, StateKind::Exit);
  for (std::size_t x : exits) {
    if (f.reachable[x]) f.reachable_exits.push_back(x);
  }
  const auto reaches_exit = bfs(g.in, exits);
  f.doomed.assign(g.size(), false);
  for (std::size_t v = 0; v < g.size(); ++v) f.doomed[v] = f.reachable[v] && !reaches_exit[v];
  return f;
}

std::vector<std::size_t> chain_indices(const Graph& g, const LinearityFacts& f) {
  if (!f.single_entry || f.reachable_exits.size() != 1) return {};
  const std::size_t exit = f.reachable_exits.front();

  // Shortest distances order the dominators along the chain.
  std::vector<std::size_t> dist(g.size(), static_cast<std::size_t>(-1));
  std::deque<std::size_t> queue{f.entry};
  dist[f.entry] = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : g.out[u]) {
      if (dist[v] != static_cast<std::size_t>(-1)) continue;
      dist[v] = dist[u] + 1;
      queue.push_back(v);
    }
  }

  std::vector<std::size_t> chain;
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (!f.reachable[v]) continue;
    if (v == f.entry || v == exit || !bfs(g.out, {f.entry}, v)[exit]) chain.push_back(v);
  }
  std::sort(chain.begin(), chain.end(),
            [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
  return chain;
}

}  // namespace

std::size_t DiagnosticReport::error_count() const {
  return static_cast<std::size_t>(std::count_if(
      diagnostics.begin(), diagnostics.end(),
      [](const Diagnostic& d) { return d.severity == Severity::Error; }));
}

std::size_t DiagnosticReport::warning_count() const {
  return diagnostics.size() - error_count();
}

Severity severity_of(DiagnosticCode code) {
  switch (code) {
    case DiagnosticCode::UnassignedRole:
    case DiagnosticCode::UnusedEntity:
      return Severity::Warning;
    default:
      return Severity::Error;
  }
}

Diagnostic make_diagnostic(DiagnosticCode code, std::string subject, std::string message) {
  return {severity_of(code), code, std::move(subject), std::move(message)};
}

std::set<std::string> check_reachability(const ScenarioDoc& doc) {
  const Graph g(doc);
  const auto seen = bfs(g.out, states_of_kind(doc, StateKind::Entry));
  std::set<std::string> out;
  for (std::size_t i = 0; i < doc.states.size(); ++i) {
    if (!seen[i]) out.insert(doc.states[i].name);
  }
  return out;
}

std::vector<Diagnostic> check_roles(const ScenarioDoc& doc) {
  std::set<std::string_view> assigned;
  for (const auto& t : doc.transitions) assigned.insert(t.actor);
  for (const auto& r : doc.roles) {
    if (r.behavior && r.behavior->target) assigned.insert(*r.behavior->target);
  }
  std::vector<Diagnostic> out;
  for (const auto& r : doc.roles) {
    if (!assigned.count(r.name)) {
      out.push_back(make_diagnostic(DiagnosticCode::UnassignedRole, r.name,
                                    "role '" + r.name + "' never acts and is never targeted"));
    }
    if (r.controller == Controller::Npc && !r.behavior) {
      out.push_back(make_diagnostic(DiagnosticCode::MissingNpcBehavior, r.name,
                                    "NPC role '" + r.name + "' has no behavior"));
    }
  }
  sort_diagnostics(out);
  return out;
}

std::vector<Diagnostic> check_linearity(const ScenarioDoc& doc) {
  const Graph g(doc);
  const LinearityFacts f = linearity_facts(doc, g);
  std::vector<Diagnostic> out;
  if (!f.single_entry) return out;

  // Traps: bottom components of the sub-graph that can no longer reach an Exit.
  std::size_t n_comp = 0;
  const auto comp = strongly_connected(g, f.doomed, n_comp);
  std::vector<bool> leaves(n_comp, false);
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (f.doomed[v]) leaves[comp[v]] = true;
  }
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (!f.doomed[v]) continue;
    for (std::size_t w : g.out[v]) {
      if (comp[w] != comp[v]) leaves[comp[v]] = false;
    }
  }
  bool any_doomed = false;
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (!f.doomed[v]) continue;
    any_doomed = true;
    if (leaves[comp[v]]) {
      const auto& name = doc.states[v].name;
      out.push_back(make_diagnostic(DiagnosticCode::DeadEnd, name,
                                    "no exit state can be reached from '" + name + "'"));
    }
  }

  if (f.reachable_exits.size() > 1) {
    std::vector<std::string> names;
    for (std::size_t x : f.reachable_exits) names.push_back(doc.states[x].name);
    std::sort(names.begin(), names.end());
    out.push_back(make_diagnostic(DiagnosticCode::NotLinear, join(names, ","),
                                  "player choices can end in different exits: " + join(names, ", ")));
  }

  if (f.reachable_exits.size() == 1 && !any_doomed) {
    const auto chain = chain_indices(g, f);
    std::vector<bool> off_chain = f.reachable;
    for (std::size_t v : chain) off_chain[v] = false;
    const auto side = strongly_connected(g, off_chain, n_comp);
    std::vector<std::vector<std::string>> members(n_comp);
    std::vector<bool> cyclic(n_comp, false);
    for (std::size_t v = 0; v < g.size(); ++v) {
      if (!off_chain[v]) continue;
      members[side[v]].push_back(doc.states[v].name);
      for (std::size_t w : g.out[v]) {
        if (w == v) cyclic[side[v]] = true;
      }
    }
    for (std::size_t c = 0; c < n_comp; ++c) {
      if (members[c].size() > 1) cyclic[c] = true;
      if (!cyclic[c]) continue;
      std::sort(members[c].begin(), members[c].end());
      out.push_back(make_diagnostic(DiagnosticCode::NotLinear, members[c].front(),
                                    "cycle avoids the progress chain: " + join(members[c], ", ")));
    }
  }
  sort_diagnostics(out);
  return out;
}

std::vector<std::string> progress_chain(const ScenarioDoc& doc) {
  const Graph g(doc);
  const LinearityFacts f = linearity_facts(doc, g);
  std::vector<std::string> out;
  for (std::size_t v : chain_indices(g, f)) out.push_back(doc.states[v].name);
  return out;
}

DiagnosticReport validate(const ScenarioDoc& doc) {
  std::vector<Diagnostic> all;
  const auto entries = states_of_kind(doc, StateKind::Entry);
  if (entries.size() != 1) {
    std::vector<std::string> names;
    for (std::size_t i : entries) names.push_back(doc.states[i].name);
    std::sort(names.begin(), names.end());
    all.push_back(make_diagnostic(
        DiagnosticCode::MultipleEntries, names.empty() ? doc.name : join(names, ","),
        "expected exactly one entry state, found " + std::to_string(entries.size())));
  }
  if (states_of_kind(doc, StateKind::Exit).empty()) {
    all.push_back(make_diagnostic(DiagnosticCode::NoExit, doc.name, "scenario declares no exit state"));
  }
  if (!entries.empty()) {
    for (const auto& name : check_reachability(doc)) {
      all.push_back(make_diagnostic(DiagnosticCode::UnreachableState, name,
                                    "state '" + name + "' is unreachable from the entry state"));
    }
  }
  for (auto& d : check_roles(doc)) all.push_back(std::move(d));
  for (auto& d : check_linearity(doc)) all.push_back(std::move(d));

  std::set<std::string_view> used;
  for (const auto& t : doc.transitions) {
    if (t.action.target) used.insert(*t.action.target);
  }
  for (const auto& r : doc.roles) {
    if (!r.behavior) continue;
    if (r.behavior->target) used.insert(*r.behavior->target);
    for (const auto* list : {&r.behavior->script, &r.behavior->priorities}) {
      for (const auto& a : *list) {
        if (a.target) used.insert(*a.target);
      }
    }
  }
  for (const auto& e : doc.entities) {
    if (!used.count(e.name)) {
      all.push_back(make_diagnostic(DiagnosticCode::UnusedEntity, e.name,
                                    "entity '" + e.name + "' is never used by an action or behavior"));
    }
  }

  sort_diagnostics(all);
  DiagnosticReport report;
  report.diagnostics = std::move(all);
  report.ok = report.error_count() == 0;
  return report;
}

std::string export_dot(const ScenarioDoc& input) {
  const ScenarioDoc doc = normalize(input);
  std::ostringstream os;
  os << "digraph \"" << dot_escape(doc.name) << "\" {\n";
  os << "  rankdir=LR;\n";
  for (const auto& s : doc.states) {
    std::string_view shape = "box";
    if (s.kind == StateKind::Entry) shape = "doublecircle";
    if (s.kind == StateKind::Exit) shape = "doubleoctagon";
    os << "  \"" << dot_escape(s.name) << "\" [shape=" << shape << "];\n";
  }
  for (const auto& t : doc.transitions) {
    std::string label = t.action.name;
    if (t.action.target) label += "(" + *t.action.target + ")";
    label += "/" + t.actor;
    os << "  \"" << dot_escape(t.from) << "\" -> \"" << dot_escape(t.to) << "\" [label=\""
       << dot_escape(label) << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

std::string_view to_string(Severity s) { return s == Severity::Error ? "error" : "warning"; }

std::string_view to_string(DiagnosticCode c) {
  switch (c) {
    case DiagnosticCode::UnreachableState: return "UnreachableState";
    case DiagnosticCode::UnassignedRole: return "UnassignedRole";
    case DiagnosticCode::DeadEnd: return "DeadEnd";
    case DiagnosticCode::NotLinear: return "NotLinear";
    case DiagnosticCode::MultipleEntries: return "MultipleEntries";
    case DiagnosticCode::NoExit: return "NoExit";
    case DiagnosticCode::UnusedEntity: return "UnusedEntity";
    case DiagnosticCode::MissingNpcBehavior: return "MissingNpcBehavior";
  }
  return "?";
}

std::string format_report(const DiagnosticReport& report) {
  std::ostringstream os;
  for (const auto& d : report.diagnostics) {
    os << to_string(d.severity) << " " << to_string(d.code) << " " << d.subject << ": "
       << d.message << "\n";
  }
  os << (report.ok ? "OK: " : "FAILED: ") << report.error_count() << " errors, "
     << report.warning_count() << " warnings\n";
  return os.str();
}

std::string report_to_json(const DiagnosticReport& report) {
  detail::ojson diags = detail::ojson::array();
  for (const auto& d : report.diagnostics) {
    diags.push_back(detail::ojson{{"severity", to_string(d.severity)},
                                  {"code", to_string(d.code)},
                                  {"subject", d.subject},
                                  {"message", d.message}});
  }
  detail::ojson root{{"ok", report.ok},
                     {"errors", report.error_count()},
                     {"warnings", report.warning_count()},
                     {"diagnostics", diags}};
  return root.dump(2) + "\n";
}

}  // namespace scengen
