#pragma once

// Private helpers shared by the JSON readers/writers. Not installed.

#include <string>
#include <string_view>
#include <vector>

#include "convseg/error.hpp"
#include "json.hpp"

namespace convseg::detail {

using nlohmann::json;

inline json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError("malformed JSON in " + std::string(what) + ": " + e.what());
  }
}

inline const json& require(const json& obj, const char* key, std::string_view what) {
  if (!obj.is_object()) throw ValidationError(std::string(what) + " is not a JSON object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(std::string(what) + " is missing \"" + key + "\"");
  return *it;
}

template <typename T>
T get_as(const json& value, std::string_view what) {
  try {
    return value.get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string(what) + " has the wrong type: " + e.what());
  }
}

template <typename T>
T require_as(const json& obj, const char* key, std::string_view what) {
  return get_as<T>(require(obj, key, what), std::string(what) + "." + key);
}

inline std::vector<double> to_vector(const json& value, std::string_view what) {
  if (!value.is_array()) throw ValidationError(std::string(what) + " is not an array");
  std::vector<double> out;
  out.reserve(value.size());
  for (const json& x : value) {
    if (!x.is_number()) throw ValidationError(std::string(what) + " holds a non-numeric entry");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace convseg::detail
