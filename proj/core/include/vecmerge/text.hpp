#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vecmerge {

/// Shortest decimal form that parses back to exactly the same double.
/// Independent of the global locale.
std::string format_double(double value);
void append_double(std::string& out, double value);

/// Locale-independent strict parse of a whole field; nullopt on any junk.
/// Accepts "nan"/"inf" spellings so callers can reject them by value.
std::optional<double> parse_double(std::string_view field);
std::optional<long long> parse_integer(std::string_view field);

/// Splits on spaces, tabs, CR and LF. Empty fields are never produced.
std::vector<std::string_view> split_whitespace(std::string_view line);

/// Lowercases ASCII letters; bytes >= 0x80 pass through unchanged.
std::string ascii_lower(std::string_view text);

}  // namespace vecmerge
