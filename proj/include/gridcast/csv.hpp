#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gridcast::csv {

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

/// Full-string double parse; nullopt on garbage, trailing characters, or
/// overflow. Accepts "nan"/"inf" spellings (callers reject them per-field).
std::optional<double> parse_double(std::string_view text);

std::optional<long> parse_long(std::string_view text);

/// Splits one line on commas. The formats used here never quote fields.
std::vector<std::string_view> split_fields(std::string_view line);

/// Splits file content into lines, tolerating CRLF and a missing trailing
/// newline. Empty trailing lines are dropped.
std::vector<std::string_view> split_lines(std::string_view content);

std::string read_file(const std::string& path);

/// Writes content to a temp file in the same directory, then renames it over
/// the destination.
void atomic_write(const std::string& path, std::string_view content);

}  // namespace gridcast::csv
