#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace raingnn::csv {

// Splits one CSV line (RFC 4180 quoting, no embedded newlines). Returns
// nullopt on an unterminated quote or stray characters after a closing quote.
std::optional<std::vector<std::string>> split_line(std::string_view line);

// Quotes a field only when it contains a delimiter, quote, or surrounding space.
std::string escape(std::string_view field);

// Reads non-empty lines, tracking 1-based line numbers. Strips a UTF-8 BOM on
// the first line and a trailing '\r'.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line);
  std::size_t line_number() const { return line_number_; }

 private:
  std::istream& in_;
  std::size_t line_number_ = 0;
};

}  // namespace raingnn::csv
