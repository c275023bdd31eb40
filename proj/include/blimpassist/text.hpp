#pragma once

// Locale-independent number formatting and small file helpers shared by the
// CSV and JSON writers.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace blimpassist {

/// Fixed notation with `decimals` digits after the point.
std::string format_fixed(double value, int decimals);

/// Shortest representation that parses back to the same double.
std::string format_exact(double value);

/// Trace number format: 9 significant digits, widened for |x| >= 1 so that
/// 9 digits always follow the decimal point.
std::string format_trace_number(double value);

std::string_view trim(std::string_view text);

/// Splits a comma-separated line into exactly `expected` doubles. Throws
/// ParseError mentioning `context` on count mismatch or bad numbers.
std::vector<double> parse_csv_numbers(std::string_view line, std::size_t expected,
                                      const std::string& context);

std::vector<std::string_view> split(std::string_view line, char sep);
double parse_double(std::string_view field, const std::string& context);

/// Throws Error(Io) naming the path on failure.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace blimpassist
