#ifndef XIDPS_CSV_HPP
#define XIDPS_CSV_HPP

#include <string>
#include <string_view>
#include <vector>

namespace xidps::csv {

// RFC-4180 parsing: quoted fields may contain commas, doubled quotes and
// newlines; CRLF and LF both terminate records. Unquoted cells are trimmed
// of surrounding whitespace.
std::vector<std::vector<std::string>> parse(std::string_view text);

std::vector<std::vector<std::string>> read_file(const std::string& path);

// Quotes a cell only when it needs it.
std::string escape(const std::string& cell);

std::string join_row(const std::vector<std::string>& cells);

}  // namespace xidps::csv

#endif  // XIDPS_CSV_HPP
