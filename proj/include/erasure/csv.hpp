#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace erasure::csv {

using Row = std::vector<std::string>;

/// Reads RFC-4180 records: comma delimiter, double-quote escaping, quoted
/// fields may span lines. CRLF and LF line endings are both accepted.
/// Unquoted fields are trimmed of surrounding blanks.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Next record into `row`; false at end of input. Blank lines are skipped.
  bool next(Row& row);

  /// 1-based line number where the last returned record started.
  std::size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
};

/// Quotes a field when it contains a comma, quote or line break.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const Row& row);

/// Empty and "?" fields are missing values.
inline bool is_missing(std::string_view token) { return token.empty() || token == "?"; }

/// Finite decimal number (optional leading '+'); nullopt otherwise.
std::optional<double> parse_number(std::string_view token);

}  // namespace erasure::csv
