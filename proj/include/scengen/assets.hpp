#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "scengen/model.hpp"

namespace scengen {

struct AssetEntry {
  std::string tag;
  std::string asset_id;
  std::string pack;
  std::string display_name;

  bool operator==(const AssetEntry&) const = default;
};

/// Tag -> asset lookup; exact, case-sensitive.
class AssetCatalog {
public:
  AssetCatalog() = default;

  /// Throws DuplicateTagError when the tag is already present.
  void add(AssetEntry entry, int line = 0);
  const AssetEntry* find(std::string_view tag) const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<std::string, AssetEntry, std::less<>>& entries() const { return entries_; }

private:
  std::map<std::string, AssetEntry, std::less<>> entries_;
};

class ManifestError : public Error {
public:
  ManifestError(int line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

class DuplicateTagError : public ManifestError {
public:
  DuplicateTagError(int line, const std::string& tag)
      : ManifestError(line, "duplicate tag '" + tag + "'"), tag_(tag) {}
  const std::string& tag() const { return tag_; }

private:
  std::string tag_;
};

/// Parses `assets.tsv`: one `tag<TAB>asset_id<TAB>pack<TAB>display_name` row
/// per line. Blank lines and lines starting with '#' are skipped.
AssetCatalog load_manifest(std::string_view source);

struct AssetRef {
  std::string asset_id;
  std::string pack;
  std::string display_name;

  bool operator==(const AssetRef&) const = default;
};

struct AssetBinding {
  std::string entity;
  std::variant<AssetRef, Placeholder> resolved;

  bool is_placeholder() const { return std::holds_alternative<Placeholder>(resolved); }
  bool operator==(const AssetBinding&) const = default;
};

struct BindResult {
  std::vector<AssetBinding> bindings;  // sorted by entity name
  std::vector<std::string> warnings;   // one per entity that fell back to its placeholder
};

BindResult bind_assets(const ScenarioDoc& doc, const AssetCatalog& catalog);

}  // namespace scengen
