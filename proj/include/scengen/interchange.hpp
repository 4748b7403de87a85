#pragma once

#include <string>
#include <string_view>

#include "scengen/model.hpp"

namespace scengen {

/// A structured-text document that does not match its schema. `path()` is a
/// JSON pointer to the offending field, e.g. "/states" or "/roles/2/health".
class SchemaError : public Error {
public:
  SchemaError(const std::string& message, std::string path)
      : Error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

private:
  std::string path_;
};

class InterchangeError : public SchemaError {
public:
  using SchemaError::SchemaError;
};

/// JSON interchange form; top-level keys name, mode, roles, entities, states,
/// transitions, goals, metadata. Lossless: from_interchange(to_interchange(d)) == d.
std::string to_interchange(const ScenarioDoc& doc);

/// Throws InterchangeError naming the path of the first offending field.
ScenarioDoc from_interchange(std::string_view text);

}  // namespace scengen
