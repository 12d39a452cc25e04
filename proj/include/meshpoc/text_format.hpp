#pragma once

// Helpers shared by the line-oriented file formats.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace meshpoc::text {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

std::vector<std::string_view> split_ws(std::string_view line);
std::vector<std::string_view> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

/// Parsers throw ParseError tagged with `line` on malformed input.
double parse_double(std::string_view tok, std::size_t line);
std::int64_t parse_int(std::string_view tok, std::size_t line);

/// Splits "key=value"; throws ParseError if there is no '='.
std::pair<std::string_view, std::string_view> parse_key_value(std::string_view tok, std::size_t line);

/// True for blank lines and lines whose first non-space character is '#'.
bool is_comment_or_blank(std::string_view line);

/// 64-bit FNV-1a over the bytes of a file; nullopt when it cannot be read.
std::optional<std::uint64_t> file_digest(const std::string& path);
std::string hex64(std::uint64_t v);

}  // namespace meshpoc::text
