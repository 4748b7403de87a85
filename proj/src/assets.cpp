#include "scengen/assets.hpp"

#include <algorithm>

namespace scengen {

void AssetCatalog::add(AssetEntry entry, int line) {
  const std::string tag = entry.tag;
  if (!entries_.emplace(tag, std::move(entry)).second) throw DuplicateTagError(line, tag);
}

const AssetEntry* AssetCatalog::find(std::string_view tag) const {
  auto it = entries_.find(tag);
  return it == entries_.end() ? nullptr : &it->second;
}

AssetCatalog load_manifest(std::string_view source) {
  AssetCatalog catalog;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    std::size_t end = source.find('\n', pos);
    if (end == std::string_view::npos) end = source.size();
    std::string_view line = source.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 4) {
      throw ManifestError(line_no, "expected 4 tab-separated fields, found " +
                                       std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw ManifestError(line_no, "empty tag");
    if (fields[1].empty()) throw ManifestError(line_no, "empty asset_id");
    catalog.add({std::string(fields[0]), std::string(fields[1]), std::string(fields[2]),
                 std::string(fields[3])},
                line_no);
  }
  return catalog;
}

BindResult bind_assets(const ScenarioDoc& doc, const AssetCatalog& catalog) {
  std::vector<const Entity*> entities;
  for (const auto& e : doc.entities) entities.push_back(&e);
  std::sort(entities.begin(), entities.end(),
            [](const Entity* a, const Entity* b) { return a->name < b->name; });

  BindResult result;
  for (const Entity* e : entities) {
    if (const AssetEntry* hit = catalog.find(e->tag)) {
      result.bindings.push_back({e->name, AssetRef{hit->asset_id, hit->pack, hit->display_name}});
    } else {
      result.bindings.push_back({e->name, e->placeholder});
      result.warnings.push_back("entity '" + e->name + "': no asset for tag '" + e->tag +
                                "', using " + std::string(to_string(e->placeholder)) +
                                " placeholder");
    }
  }
  return result;
}

}  // namespace scengen
