#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace edgegen {

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

/// Strict decimal parse of a whole string; throws ParseError.
double parse_double(std::string_view text);

/// FNV-1a 64-bit hash, used for content identification.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// Whole-file read; throws std::runtime_error if the file cannot be opened.
std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary file and rename so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// "line L, column C" for a byte offset into `text`.
std::string line_context(std::string_view text, std::size_t byte_offset);

/// UTC wall-clock timestamp, ISO-8601. Only manifests carry timestamps.
std::string utc_timestamp();

}  // namespace edgegen
