#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "scengen/assets.hpp"
#include "scengen/compiler.hpp"
#include "scengen/parser.hpp"
#include "scengen/runtime.hpp"

namespace scengen {

struct PlayPath {
  std::vector<ScriptStep> actions;
  SessionStatus status = SessionStatus::Running;
  std::size_t terminal_state = 0;
  std::int64_t final_score = 0;

  bool operator==(const PlayPath&) const = default;
};

struct PathSet {
  std::vector<PlayPath> paths;  // sorted by action sequence; every path ends Won or Lost
  bool truncated = false;       // max_paths was hit
  std::size_t pruned = 0;       // branches cut by the loop-visit bound
};

/// Depth-first enumeration of player action sequences, one round per action
/// (NPC phases included). A state may be occupied at most max_loop_visits + 1
/// times along a path.
PathSet enumerate_paths(const GameDefinition& def, std::size_t max_loop_visits,
                        std::size_t max_paths = 100000, std::uint64_t seed = 0);

struct PipelineMetrics {
  double parse_ms = 0;
  double validate_ms = 0;
  double compile_ms = 0;
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::size_t entities = 0;
  std::size_t bundle_bytes = 0;

  double total_ms() const { return parse_ms + validate_ms + compile_ms; }
};

/// Thrown by measure_pipeline when the source does not parse.
class PipelineError : public Error {
public:
  explicit PipelineError(std::vector<ParseError> errors);
  const std::vector<ParseError>& errors() const { return errors_; }

private:
  std::vector<ParseError> errors_;
};

/// Parse + validate + compile + emit with monotonic timings. Propagates
/// PipelineError (parse) and RejectedScenario (validation).
PipelineMetrics measure_pipeline(std::string_view source, const AssetCatalog& catalog = {});

std::string metrics_to_json(const PipelineMetrics& m);

enum class Verdict { Invariant, Violated };

struct CompareReport {
  std::vector<Outcome> outcomes;
  Verdict verdict = Verdict::Invariant;  // Invariant iff all Won outcomes share a terminal state
};

CompareReport compare_runs(const GameDefinition& def, const std::vector<std::vector<ScriptStep>>& scripts,
                           std::uint64_t seed = 0);

std::string_view to_string(Verdict v);

}  // namespace scengen
