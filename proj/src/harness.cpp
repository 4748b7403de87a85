#include "scengen/harness.hpp"

#include <algorithm>
#include <chrono>

#include "detail/json_read.hpp"

namespace scengen {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

class PathWalker {
public:
  PathWalker(std::size_t max_visits, std::size_t max_paths, PathSet& out)
      : max_visits_(max_visits + 1), max_paths_(max_paths), out_(out) {}

  void walk(const GameSession& session, std::vector<std::size_t>& visits,
            std::vector<ScriptStep>& prefix) {
    if (out_.truncated) return;
    if (session.terminal()) {
      if (out_.paths.size() >= max_paths_) {
        out_.truncated = true;
        return;
      }
      out_.paths.push_back({prefix, session.status, session.current_state, session.score});
      return;
    }
    for (const MenuItem& item : available_actions(session)) {
      GameSession next = session;
      advance(next, item.action, item.target);
      if (visits[next.current_state] + 1 > max_visits_) {
        ++out_.pruned;
        continue;
      }
      ++visits[next.current_state];
      prefix.push_back({item.action, item.target});
      walk(next, visits, prefix);
      prefix.pop_back();
      --visits[next.current_state];
      if (out_.truncated) return;
    }
  }

private:
  std::size_t max_visits_;
  std::size_t max_paths_;
  PathSet& out_;
};

}  // namespace

PathSet enumerate_paths(const GameDefinition& def, std::size_t max_loop_visits, std::size_t max_paths,
                        std::uint64_t seed) {
  PathSet out;
  GameSession root = start_session(def, seed);
  std::vector<std::size_t> visits(def.states.size(), 0);
  visits[root.current_state] = 1;
  std::vector<ScriptStep> prefix;
  PathWalker(max_loop_visits, max_paths, out).walk(root, visits, prefix);
  std::sort(out.paths.begin(), out.paths.end(),
            [](const PlayPath& a, const PlayPath& b) { return a.actions < b.actions; });
  return out;
}

PipelineError::PipelineError(std::vector<ParseError> errors)
    : Error(errors.empty() ? "parse failed" : "parse failed: " + format_error(errors.front())),
      errors_(std::move(errors)) {}

PipelineMetrics measure_pipeline(std::string_view source, const AssetCatalog& catalog) {
  PipelineMetrics m;
  auto start = Clock::now();
  ParseResult parsed = parse(source);
  m.parse_ms = ms_since(start);
  if (!parsed.ok()) throw PipelineError(std::move(parsed.errors));

  start = Clock::now();
  DiagnosticReport report = validate(*parsed.doc);
  m.validate_ms = ms_since(start);
  if (!report.ok) throw RejectedScenario(std::move(report));

  start = Clock::now();
  const GameDefinition def = compile(*parsed.doc, catalog);
  const std::string bundle = emit_bundle(def);
  m.compile_ms = ms_since(start);

  const ScenarioSummary s = summary(*parsed.doc);
  m.states = s.state_count;
  m.transitions = s.transition_count;
  m.entities = s.entity_count;
  m.bundle_bytes = bundle.size();
  return m;
}

std::string metrics_to_json(const PipelineMetrics& m) {
  detail::ojson j{{"parse_ms", m.parse_ms},
                  {"validate_ms", m.validate_ms},
                  {"compile_ms", m.compile_ms},
                  {"total_ms", m.total_ms()},
                  {"states", m.states},
                  {"transitions", m.transitions},
                  {"entities", m.entities},
                  {"bundle_bytes", m.bundle_bytes}};
  return j.dump(2) + "\n";
}

CompareReport compare_runs(const GameDefinition& def, const std::vector<std::vector<ScriptStep>>& scripts,
                           std::uint64_t seed) {
  CompareReport report;
  auto shared = std::make_shared<const GameDefinition>(def);
  std::optional<std::size_t> won_state;
  for (const auto& script : scripts) {
    Outcome o = run_script(shared, seed, script);
    if (o.status == SessionStatus::Won) {
      if (won_state && *won_state != o.terminal_state) report.verdict = Verdict::Violated;
      won_state = o.terminal_state;
    }
    report.outcomes.push_back(std::move(o));
  }
  return report;
}

std::string_view to_string(Verdict v) { return v == Verdict::Invariant ? "invariant" : "violated"; }

}  // namespace scengen
