#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "error.hpp"

namespace peerinfl::csv {

struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

// Splits one CSV record. Supports double-quoted fields with "" escapes;
// embedded newlines are not supported.
inline std::vector<std::string> split_record(std::string_view text, std::size_t line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      if (!field.empty() || was_quoted) throw ParseError(line, "unexpected quote");
      quoted = was_quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else {
      if (was_quoted) throw ParseError(line, "text after closing quote");
      field.push_back(ch);
    }
  }
  if (quoted) throw ParseError(line, "unterminated quote");
  out.push_back(std::move(field));
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

// Reads all non-blank records; strips a UTF-8 BOM and trailing CRs.
inline std::vector<Row> read_rows(std::istream& in, bool skip_header) {
  std::vector<Row> rows;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (line == 1 && text.rfind("\xEF\xBB\xBF", 0) == 0) text.erase(0, 3);
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (trim(text).empty()) continue;
    if (skip_header && line == 1) continue;
    auto fields = split_record(text, line);
    for (auto& f : fields) f = std::string(trim(f));
    rows.push_back({line, std::move(fields)});
  }
  return rows;
}

inline double parse_double(std::string_view s, std::size_t line, std::string_view what) {
  s = trim(s);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value))
    throw ParseError(line, "cannot parse " + std::string(what) + " '" + std::string(s) + "'");
  return value;
}

inline std::optional<double> parse_optional_double(std::string_view s, std::size_t line,
                                                   std::string_view what) {
  if (trim(s).empty()) return std::nullopt;
  return parse_double(s, line, what);
}

// Shortest representation that round-trips.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string escape(std::string_view s) {
  if (s.find_first_of(",\"") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace peerinfl::csv
