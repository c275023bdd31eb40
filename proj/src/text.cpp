#include "blimpassist/text.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "blimpassist/error.hpp"

namespace blimpassist {

namespace {

std::string to_chars_or_throw(double value, std::chars_format fmt, int precision) {
  std::array<char, 128> buf{};
  const auto res = precision < 0 ? std::to_chars(buf.data(), buf.data() + buf.size(), value, fmt)
                                 : std::to_chars(buf.data(), buf.data() + buf.size(), value, fmt,
                                                 precision);
  if (res.ec != std::errc{}) throw Error(ErrorCode::ParseError, "number formatting failed");
  return std::string(buf.data(), res.ptr);
}

}  // namespace

std::string format_fixed(double value, int decimals) {
  return to_chars_or_throw(value, std::chars_format::fixed, decimals);
}

std::string format_exact(double value) {
  return to_chars_or_throw(value, std::chars_format::general, -1);
}

std::string format_trace_number(double value) {
  int digits = 9;
  const double mag = std::abs(value);
  if (std::isfinite(mag) && mag >= 1.0) digits += static_cast<int>(std::floor(std::log10(mag))) + 1;
  std::string s = to_chars_or_throw(value, std::chars_format::general, digits);
  if (s == "-0") s = "0";
  return s;
}

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view field, const std::string& context) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw Error(ErrorCode::ParseError, context + ": bad number '" + std::string(field) + "'");
  }
  return value;
}

std::vector<double> parse_csv_numbers(std::string_view line, std::size_t expected,
                                      const std::string& context) {
  const auto fields = split(trim(line), ',');
  if (fields.size() != expected) {
    throw Error(ErrorCode::ParseError, context + ": expected " + std::to_string(expected) +
                                           " fields, got " + std::to_string(fields.size()));
  }
  std::vector<double> out;
  out.reserve(expected);
  for (auto f : fields) out.push_back(parse_double(f, context));
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, "read failed on '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failed on '" + path.string() + "'");
}

}  // namespace blimpassist
