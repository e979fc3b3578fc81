#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include "edgegen/errors.hpp"
#include <nlohmann/json.hpp>

namespace edgegen::detail {

using Json = nlohmann::json;

/// Parses `text`, turning syntax errors into ParseError with line context.
Json parse_json(std::string_view text, std::string_view what);

/// Throws ParseError if `obj` is not an object or has keys outside `allowed`.
void require_keys(const Json& obj, std::initializer_list<std::string_view> allowed, std::string_view where);

const Json& require(const Json& obj, std::string_view key, std::string_view where);

double get_number(const Json& obj, std::string_view key, std::string_view where);
std::int64_t get_int(const Json& obj, std::string_view key, std::string_view where);
std::uint64_t get_uint(const Json& obj, std::string_view key, std::string_view where);
std::string get_string(const Json& obj, std::string_view key, std::string_view where);
bool get_bool(const Json& obj, std::string_view key, std::string_view where);

/// Overwrites `out` only when `key` is present.
void read_opt(const Json& obj, std::string_view key, double& out, std::string_view where);
void read_opt(const Json& obj, std::string_view key, std::int64_t& out, std::string_view where);
void read_opt(const Json& obj, std::string_view key, int& out, std::string_view where);
void read_opt(const Json& obj, std::string_view key, std::uint64_t& out, std::string_view where);
void read_opt(const Json& obj, std::string_view key, std::string& out, std::string_view where);

}  // namespace edgegen::detail
