#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "fieldnet/error.hpp"

namespace fieldnet::csv {

struct Format {
  char delimiter = ',';
  char quote = '"';
};

struct Row {
  std::size_t line = 0;  // 1-based line on which the row starts
  std::vector<std::string> fields;
};

/// Streaming reader for delimiter-separated text with optional quoting.
/// A quoted field may contain the delimiter, newlines, and doubled quotes.
/// Blank lines are skipped.
class Reader {
 public:
  explicit Reader(std::istream& in, Format format = {}) : in_(in), format_(format) {}

  bool next(Row& row) {
    row.fields.clear();
    while (true) {
      if (!in_.good()) return false;
      row.line = line_ + 1;
      if (read_row(row.fields)) return true;
      if (in_.bad()) throw IoError("read error near line " + std::to_string(line_));
    }
  }

 private:
  // Returns false for a blank line.
  bool read_row(std::vector<std::string>& fields) {
    std::string field;
    bool in_quotes = false;
    bool any = false;
    bool was_quoted = false;
    int ch;
    while ((ch = in_.get()) != std::char_traits<char>::eof()) {
      const char c = static_cast<char>(ch);
      any = true;
      if (in_quotes) {
        if (c == format_.quote) {
          if (in_.peek() == format_.quote) {
            field.push_back(format_.quote);
            in_.get();
          } else {
            in_quotes = false;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(c);
        }
        continue;
      }
      if (c == format_.quote && !was_quoted && is_blank(field)) {
        field.clear();
        in_quotes = true;
        was_quoted = true;
      } else if (c == format_.delimiter) {
        fields.push_back(std::move(field));
        field.clear();
        was_quoted = false;
      } else if (c == '\n') {
        ++line_;
        break;
      } else if (c == '\r') {
        if (in_.peek() == '\n') continue;
        field.push_back(c);
      } else {
        field.push_back(c);
      }
    }
    if (in_quotes) throw DataError("unterminated quoted field starting before line " + std::to_string(line_ + 1));
    if (!any) return false;
    if (fields.empty() && is_blank(field)) return false;
    fields.push_back(std::move(field));
    return true;
  }

  static bool is_blank(std::string_view s) {
    return s.find_first_not_of(" \t") == std::string_view::npos;
  }

  std::istream& in_;
  Format format_;
  std::size_t line_ = 0;
};

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

/// Quotes `field` only when it holds the delimiter, a quote, or a line break.
inline std::string escape(std::string_view field, Format format = {}) {
  const bool needs_quotes = field.find(format.delimiter) != std::string_view::npos ||
                            field.find(format.quote) != std::string_view::npos ||
                            field.find_first_of("\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back(format.quote);
  for (const char c : field) {
    if (c == format.quote) out.push_back(format.quote);
    out.push_back(c);
  }
  out.push_back(format.quote);
  return out;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields, Format format = {}) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.put(format.delimiter);
    out << escape(fields[i], format);
  }
  out.put('\n');
}

}  // namespace fieldnet::csv
