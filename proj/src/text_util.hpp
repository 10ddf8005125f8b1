#pragma once

// Small parsing/formatting helpers for the line-oriented text formats.

#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sentinel::detail {

std::vector<std::string_view> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Fixed-point formatting with `decimals` digits after the point.
std::string format_fixed(double value, int decimals);

} // namespace sentinel::detail
