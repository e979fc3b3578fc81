#include "json_util.hpp"

#include <algorithm>
#include <limits>

#include "edgegen/io.hpp"

namespace edgegen::detail {

namespace {
std::string at(std::string_view where, std::string_view key) {
  return std::string(where) + "." + std::string(key);
}
}  // namespace

Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError(std::string(what) + ": malformed JSON at " + line_context(text, offset) + ": " + e.what());
  }
}

void require_keys(const Json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!obj.is_object()) throw ParseError(std::string(where) + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ParseError(std::string(where) + ": unknown field '" + key + "'");
    }
  }
}

const Json& require(const Json& obj, std::string_view key, std::string_view where) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) throw ParseError(at(where, key) + ": missing required field");
  return *it;
}

double get_number(const Json& obj, std::string_view key, std::string_view where) {
  const Json& v = require(obj, key, where);
  if (!v.is_number()) throw ParseError(at(where, key) + ": expected a number");
  return v.get<double>();
}

std::int64_t get_int(const Json& obj, std::string_view key, std::string_view where) {
  const Json& v = require(obj, key, where);
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      throw ParseError(at(where, key) + ": integer out of range");
    }
    return static_cast<std::int64_t>(u);
  }
  if (!v.is_number_integer()) throw ParseError(at(where, key) + ": expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t get_uint(const Json& obj, std::string_view key, std::string_view where) {
  const Json& v = require(obj, key, where);
  if (!v.is_number_unsigned()) throw ParseError(at(where, key) + ": expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string get_string(const Json& obj, std::string_view key, std::string_view where) {
  const Json& v = require(obj, key, where);
  if (!v.is_string()) throw ParseError(at(where, key) + ": expected a string");
  return v.get<std::string>();
}

bool get_bool(const Json& obj, std::string_view key, std::string_view where) {
  const Json& v = require(obj, key, where);
  if (!v.is_boolean()) throw ParseError(at(where, key) + ": expected a boolean");
  return v.get<bool>();
}

void read_opt(const Json& obj, std::string_view key, double& out, std::string_view where) {
  if (obj.contains(std::string(key))) out = get_number(obj, key, where);
}

void read_opt(const Json& obj, std::string_view key, std::int64_t& out, std::string_view where) {
  if (obj.contains(std::string(key))) out = get_int(obj, key, where);
}

void read_opt(const Json& obj, std::string_view key, int& out, std::string_view where) {
  if (!obj.contains(std::string(key))) return;
  const std::int64_t v = get_int(obj, key, where);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ParseError(at(where, key) + ": integer out of range");
  }
  out = static_cast<int>(v);
}

void read_opt(const Json& obj, std::string_view key, std::uint64_t& out, std::string_view where) {
  if (obj.contains(std::string(key))) out = get_uint(obj, key, where);
}

void read_opt(const Json& obj, std::string_view key, std::string& out, std::string_view where) {
  if (obj.contains(std::string(key))) out = get_string(obj, key, where);
}

}  // namespace edgegen::detail
