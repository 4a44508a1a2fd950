#include "xidps/csv.hpp"

#include <fstream>
#include <sstream>

#include "xidps/errors.hpp"

namespace xidps::csv {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

}  // namespace

std::vector<std::vector<std::string>> parse(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool in_quotes = false;
    bool cell_was_quoted = false;
    bool row_has_data = false;
    std::size_t quoted_end = 0;

    auto end_cell = [&] {
        if (cell_was_quoted) {
            // drop whitespace that sat outside the closing quote
            while (cell.size() > quoted_end && (cell.back() == ' ' || cell.back() == '\t'))
                cell.pop_back();
            row.push_back(cell);
        } else {
            row.push_back(trim(cell));
        }
        cell.clear();
        cell_was_quoted = false;
        quoted_end = 0;
    };
    auto end_row = [&] {
        end_cell();
        rows.push_back(std::move(row));
        row.clear();
        row_has_data = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                    quoted_end = cell.size();
                }
            } else {
                cell.push_back(c);
            }
            row_has_data = true;
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                cell_was_quoted = true;
                row_has_data = true;
                // whitespace before an opening quote is not content
                if (cell.find_first_not_of(" \t") == std::string::npos) cell.clear();
                break;
            case ',':
                end_cell();
                row_has_data = true;
                break;
            case '\n':
                if (row_has_data || !row.empty() || !cell.empty()) end_row();
                break;
            case '\r':
                // handled by the newline that follows, or trimmed
                if (!(i + 1 < text.size() && text[i + 1] == '\n')) cell.push_back(c);
                break;
            default:
                cell.push_back(c);
                row_has_data = true;
                break;
        }
    }
    if (in_quotes) throw Error(ErrorCode::IoError, "unterminated quoted field");
    if (row_has_data || !row.empty() || !cell.empty()) end_row();
    return rows;
}

std::vector<std::vector<std::string>> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string escape(const std::string& cell) {
    bool needs_quotes = false;
    for (char c : cell) {
        if (c == ',' || c == '"' || c == '\n' || c == '\r') {
            needs_quotes = true;
            break;
        }
    }
    if (!cell.empty() && (cell.front() == ' ' || cell.back() == ' ')) needs_quotes = true;
    if (!needs_quotes) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::string join_row(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out.push_back(',');
        out += escape(cells[i]);
    }
    return out;
}

}  // namespace xidps::csv
