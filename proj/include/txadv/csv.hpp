#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace txadv {

// Comma-separated, double-quote escaping, UTF-8, header row required.
// parse_csv handles quoted fields containing commas, quotes ("" escape)
// and newlines; both \n and \r\n row endings are accepted.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

std::string csv_escape(std::string_view field);
std::string csv_join(const std::vector<std::string>& fields);

// Shortest representation that round-trips exactly (std::to_chars).
std::string format_double(double v);

// Strict numeric parsers; std::nullopt on any malformed input.
std::optional<double> parse_double(std::string_view s);
std::optional<std::uint64_t> parse_u64(std::string_view s);
std::optional<std::int64_t> parse_i64(std::string_view s);

}  // namespace txadv
