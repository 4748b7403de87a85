#pragma once

// Reachability oracle kept deliberately naive: a textbook queue BFS over
// plain string edges, no shared code with the analyzer.

#include <deque>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

inline std::set<std::string> unreachable(const std::vector<std::string>& states,
                                         const std::vector<std::string>& entries,
                                         const std::vector<std::pair<std::string, std::string>>& edges) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& [a, b] : edges) adj[a].push_back(b);
  std::set<std::string> seen(entries.begin(), entries.end());
  std::deque<std::string> queue(entries.begin(), entries.end());
  while (!queue.empty()) {
    const std::string cur = queue.front();
    queue.pop_front();
    for (const auto& nxt : adj[cur]) {
      if (seen.insert(nxt).second) queue.push_back(nxt);
    }
  }
  std::set<std::string> out;
  for (const auto& s : states) {
    if (!seen.count(s)) out.insert(s);
  }
  return out;
}

}  // namespace oracle
