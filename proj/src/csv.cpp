#include "erasure/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "erasure/error.hpp"

namespace erasure::csv {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

bool Reader::next(Row& row) {
  row.clear();
  std::string field;
  bool quoted = false;      // inside quotes
  bool was_quoted = false;  // current field started with a quote
  bool any = false;
  record_line_ = line_;

  auto finish_field = [&] {
    row.push_back(was_quoted ? field : trim(field));
    field.clear();
    was_quoted = false;
  };

  int c;
  while ((c = in_.get()) != std::char_traits<char>::eof()) {
    const char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line_;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (trim(field).empty()) {
          field.clear();
          quoted = was_quoted = true;
        } else {
          field.push_back(ch);
        }
        any = true;
        break;
      case ',':
        finish_field();
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        ++line_;
        if (!any && field.empty()) {
          record_line_ = line_;
          break;  // blank line
        }
        finish_field();
        return true;
      default:
        field.push_back(ch);
        any = true;
    }
  }
  if (quoted) {
    throw Error("unterminated quoted field starting on line " +
                             std::to_string(record_line_));
  }
  if (any || !field.empty()) {
    finish_field();
    return true;
  }
  return false;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::optional<double> parse_number(std::string_view token) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last || !std::isfinite(value)) return std::nullopt;
  return value;
}

void write_row(std::ostream& out, const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << escape(row[i]);
  }
  out << '\n';
}

}  // namespace erasure::csv
