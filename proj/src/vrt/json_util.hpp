#pragma once

// Small helpers for walking nlohmann::json documents with path-qualified
// error messages ("/buildings/3/height_m: expected a finite number").

#include <cmath>
#include <string>

#include <json.hpp>

#include "vrt/error.hpp"

namespace vrt::detail {

using json = nlohmann::json;

inline std::string child_path(const std::string& parent, const std::string& key) { return parent + "/" + key; }
inline std::string child_path(const std::string& parent, std::size_t index) {
  return parent + "/" + std::to_string(index);
}

[[noreturn]] inline void parse_fail(const std::string& path, const std::string& what) {
  fail(ErrorKind::Parse, (path.empty() ? std::string("/") : path) + ": " + what);
}

inline const json& require_object(const json& v, const std::string& path) {
  if (!v.is_object()) parse_fail(path, "expected an object");
  return v;
}

inline const json& require_array(const json& v, const std::string& path) {
  if (!v.is_array()) parse_fail(path, "expected an array");
  return v;
}

inline const json& member(const json& obj, const std::string& key, const std::string& path) {
  require_object(obj, path);
  auto it = obj.find(key);
  if (it == obj.end()) parse_fail(child_path(path, key), "missing required field");
  return *it;
}

inline const json* optional_member(const json& obj, const std::string& key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

inline double finite_number(const json& v, const std::string& path) {
  if (!v.is_number()) parse_fail(path, "expected a finite number");
  double x = v.get<double>();
  if (!std::isfinite(x)) parse_fail(path, "expected a finite number");
  return x;
}

inline double number_member(const json& obj, const std::string& key, const std::string& path) {
  return finite_number(member(obj, key, path), child_path(path, key));
}

inline double number_member_or(const json& obj, const std::string& key, const std::string& path, double fallback) {
  const json* v = optional_member(obj, key);
  return v ? finite_number(*v, child_path(path, key)) : fallback;
}

inline std::string string_member(const json& obj, const std::string& key, const std::string& path) {
  const json& v = member(obj, key, path);
  if (!v.is_string()) parse_fail(child_path(path, key), "expected a string");
  return v.get<std::string>();
}

inline bool bool_member_or(const json& obj, const std::string& key, const std::string& path, bool fallback) {
  const json* v = optional_member(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) parse_fail(child_path(path, key), "expected a boolean");
  return v->get<bool>();
}

inline std::size_t count_value(const json& v, const std::string& path) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) parse_fail(path, "expected a non-negative integer");
  auto n = v.get<long long>();
  if (n < 0) parse_fail(path, "expected a non-negative integer");
  return static_cast<std::size_t>(n);
}

}  // namespace vrt::detail
