#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace scengen::detail {

using ojson = nlohmann::ordered_json;

inline std::string child(const std::string& path, std::string_view key) {
  return path + "/" + std::string(key);
}
inline std::string child(const std::string& path, std::size_t index) {
  return path + "/" + std::to_string(index);
}

/// Typed accessors over a JSON tree that throw `Err(message, path)` with a
/// JSON-pointer path on any schema violation.
template <typename Err>
struct Reader {
  static const ojson& object(const ojson& v, const std::string& path) {
    if (!v.is_object()) throw Err("expected an object", path.empty() ? "/" : path);
    return v;
  }

  static const ojson& field(const ojson& obj, std::string_view key, const std::string& path) {
    object(obj, path);
    auto it = obj.find(std::string(key));
    if (it == obj.end()) throw Err("missing field", child(path, key));
    return *it;
  }

  static const ojson& array(const ojson& v, const std::string& path) {
    if (!v.is_array()) throw Err("expected an array", path);
    return v;
  }

  static std::string str(const ojson& v, const std::string& path) {
    if (!v.is_string()) throw Err("expected a string", path);
    return v.get<std::string>();
  }

  static long long integer(const ojson& v, const std::string& path) {
    if (!v.is_number_integer()) throw Err("expected an integer", path);
    return v.get<long long>();
  }

  static int int32(const ojson& v, const std::string& path) {
    const long long x = integer(v, path);
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
      throw Err("integer out of range", path);
    }
    return static_cast<int>(x);
  }

  static std::size_t index(const ojson& v, const std::string& path) {
    const long long x = integer(v, path);
    if (x < 0) throw Err("expected a non-negative index", path);
    return static_cast<std::size_t>(x);
  }

  static bool boolean(const ojson& v, const std::string& path) {
    if (!v.is_boolean()) throw Err("expected a boolean", path);
    return v.get<bool>();
  }

  static std::optional<std::string> opt_str(const ojson& obj, std::string_view key,
                                            const std::string& path) {
    const ojson& v = field(obj, key, path);
    if (v.is_null()) return std::nullopt;
    return str(v, child(path, key));
  }

  template <typename Enum, typename Fn>
  static Enum enumeration(const ojson& v, const std::string& path, Fn from_string) {
    const std::string s = str(v, path);
    auto e = from_string(s);
    if (!e) throw Err("unknown value '" + s + "'", path);
    return *e;
  }
};

inline ojson parse_json_text(std::string_view text, bool& ok) {
  ojson j = ojson::parse(text.begin(), text.end(), nullptr, false);
  ok = !j.is_discarded();
  return j;
}

}  // namespace scengen::detail
