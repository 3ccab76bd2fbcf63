#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace rephase::csv {

/// Splits one comma-separated line, trimming surrounding whitespace per field.
std::vector<std::string> split(std::string_view line);

std::string_view trim(std::string_view s);

/// Fixed, locale-independent number formatting used by every CSV writer.
std::string num(double value, int precision = 6);

/// Writes a header or data row joined with commas and terminated by '\n'.
void row(std::ostream& out, const std::vector<std::string>& fields);
void row(std::ostream& out, std::initializer_list<std::string_view> fields);

/// Parses a double, throwing std::invalid_argument on trailing garbage.
double to_double(std::string_view text);
long long to_int(std::string_view text);

}  // namespace rephase::csv
