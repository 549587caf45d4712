#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace sibyl::csv {

struct Row {
  std::size_t line = 0;  // 1-based line where the row starts
  std::vector<std::string> fields;
};

struct Document {
  std::vector<Row> rows;
  std::vector<std::string> problems;  // unterminated quotes and similar
};

// Comma-separated, optional double-quoted fields with "" escapes, LF or CRLF
// line endings. Blank lines are skipped.
Document parse(std::string_view text);

// Quotes a field only when it contains a comma, quote or newline.
std::string escape(std::string_view field);

}  // namespace sibyl::csv
