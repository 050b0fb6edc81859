#pragma once

#include "json.hpp"
#include "searchlight/geometry.hpp"
#include "searchlight/rational.hpp"

#include <stdexcept>
#include <string>

namespace searchlight::jsonio {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& where,
                              const std::string& what) {
  throw std::runtime_error(where + ": " + what);
}

inline const json& field(const json& j, const char* name,
                         const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  const auto it = j.find(name);
  if (it == j.end()) fail(where, std::string("missing field '") + name + "'");
  return *it;
}

inline std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

inline Rational get_rational(const json& j, const std::string& where) {
  const std::string text = get_string(j, where);
  const auto parsed = parse_rational(text);
  if (!parsed) {
    if (text.find("/0") != std::string::npos) {
      fail(where, "zero denominator in '" + text + "'");
    }
    fail(where, "expected a rational 'p' or 'p/q', got '" + text + "'");
  }
  return *parsed;
}

inline Point get_point_pair(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) {
    fail(where, "expected a [x, y] pair");
  }
  return {get_rational(j[0], where + "[0]"), get_rational(j[1], where + "[1]")};
}

inline Direction get_direction(const json& j, const std::string& where) {
  const Point v = get_point_pair(j, where);
  if (v.x == 0 && v.y == 0) fail(where, "zero direction");
  return make_direction(v.x, v.y);
}

inline json point_to_json(const Point& p) {
  return json::array({format_rational(p.x), format_rational(p.y)});
}

inline json direction_to_json(const Direction& d) {
  return json::array({d.dx.str(), d.dy.str()});
}

inline json parse_document(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(what, "malformed document");
  return j;
}

}  // namespace searchlight::jsonio
