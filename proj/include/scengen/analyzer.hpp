#pragma once

#include <set>
#include <string>
#include <vector>

#include "scengen/model.hpp"

namespace scengen {

enum class Severity { Error, Warning };

// Declaration order is the report's sort order.
enum class DiagnosticCode {
  UnreachableState,
  UnassignedRole,
  DeadEnd,
  NotLinear,
  MultipleEntries,
  NoExit,
  UnusedEntity,
  MissingNpcBehavior,
};

struct Diagnostic {
  Severity severity = Severity::Error;
  DiagnosticCode code = DiagnosticCode::UnreachableState;
  std::string subject;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

struct DiagnosticReport {
  std::vector<Diagnostic> diagnostics;  // sorted by (severity, code, subject)
  bool ok = true;                       // no Error entries

  std::size_t error_count() const;
  std::size_t warning_count() const;
  bool operator==(const DiagnosticReport&) const = default;
};

Severity severity_of(DiagnosticCode code);
Diagnostic make_diagnostic(DiagnosticCode code, std::string subject, std::string message);

/// States not reachable from an Entry state, ignoring actors.
std::set<std::string> check_reachability(const ScenarioDoc& doc);

/// UnassignedRole for roles that are never an actor nor a behavior target;
/// MissingNpcBehavior for NPC roles without behavior.
std::vector<Diagnostic> check_roles(const ScenarioDoc& doc);

/// NotLinear unless exactly one Exit is reachable and every cycle touches the
/// progress chain; DeadEnd for reachable traps that cannot reach an Exit.
std::vector<Diagnostic> check_linearity(const ScenarioDoc& doc);

/// States every Entry->Exit path passes through, in progress order.
/// Empty unless exactly one Entry and exactly one reachable Exit exist.
std::vector<std::string> progress_chain(const ScenarioDoc& doc);

DiagnosticReport validate(const ScenarioDoc& doc);

/// Graphviz digraph: Entry as doublecircle, Exit as doubleoctagon, edges
/// labelled "action/actor" (with "(target)" after the action when present).
std::string export_dot(const ScenarioDoc& doc);

std::string_view to_string(Severity s);
std::string_view to_string(DiagnosticCode c);

/// One line per diagnostic followed by "OK: ..." or "FAILED: ..." summary.
std::string format_report(const DiagnosticReport& report);
std::string report_to_json(const DiagnosticReport& report);

}  // namespace scengen
