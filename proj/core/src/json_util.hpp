#pragma once

// Strict accessors for hand-written JSON documents. Every failure names the JSON path.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "plume/error.hpp"

namespace plume::detail {

using nlohmann::json;

inline std::string join(std::string_view path, std::string_view key) {
  std::string out(path);
  out += '/';
  out += key;
  return out;
}

inline void expect_object(const json& j, std::string_view path) {
  if (!j.is_object()) throw ParseError(std::string(path.empty() ? "/" : path) + ": expected an object");
}

inline void reject_unknown_keys(const json& j, std::string_view path, std::initializer_list<std::string_view> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const auto key : allowed) known = known || item.key() == key;
    if (!known) throw ParseError(join(path, item.key()) + ": unknown key");
  }
}

inline const json& require_key(const json& j, std::string_view path, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(join(path, key) + ": missing required key");
  return *it;
}

inline double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(path + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(path + ": expected a finite number");
  return d;
}

inline std::uint64_t as_u64(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ParseError(path + ": expected a non-negative integer");
}

inline std::uint32_t as_u32(const json& v, const std::string& path) {
  const std::uint64_t x = as_u64(v, path);
  if (x > std::numeric_limits<std::uint32_t>::max()) throw ParseError(path + ": integer out of range");
  return static_cast<std::uint32_t>(x);
}

inline int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ParseError(path + ": expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw ParseError(path + ": integer out of range");
  }
  return static_cast<int>(x);
}

inline bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ParseError(path + ": expected a boolean");
  return v.get<bool>();
}

inline std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ParseError(path + ": expected a string");
  return v.get<std::string>();
}

/// Reads j[key] into `out` with `convert` when present; leaves the default otherwise.
template <typename T, typename Convert>
void read_optional(const json& j, std::string_view path, const char* key, T& out, Convert convert) {
  const auto it = j.find(key);
  if (it != j.end()) out = convert(*it, join(path, key));
}

}  // namespace plume::detail
