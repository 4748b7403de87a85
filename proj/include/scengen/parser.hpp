#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scengen/model.hpp"

namespace scengen {

enum class ParseErrorKind { Syntax, UnknownKeyword, DuplicateId, DanglingReference, TypeMismatch };

struct ParseError {
  int line = 1;    // 1-based
  int column = 1;  // 1-based, in code points
  std::string message;
  ParseErrorKind kind = ParseErrorKind::Syntax;

  bool operator==(const ParseError&) const = default;
};

/// Either a normalized document or at least one error, never both.
struct ParseResult {
  std::optional<ScenarioDoc> doc;
  std::vector<ParseError> errors;

  bool ok() const { return doc.has_value(); }
};

/// Parses `.scn` text. Recovers at the next top-level block after a syntax
/// error so several problems are reported per run. Total over arbitrary bytes.
ParseResult parse(std::string_view source);

/// Canonical `.scn` text for a document (LF line endings, normalized order).
/// For every valid doc, parse(serialize(doc)) yields normalize(doc).
std::string serialize(const ScenarioDoc& doc);

std::string_view to_string(ParseErrorKind kind);

/// "file:line:col: kind: message"
std::string format_error(const ParseError& e, std::string_view file = {});

}  // namespace scengen
