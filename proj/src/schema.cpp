#include "xidps/schema.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "xidps/errors.hpp"

namespace xidps {

int Schema::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].name == name) return static_cast<int>(i);
    return -1;
}

int Schema::class_label_index() const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].kind == ColumnKind::ClassLabel) return static_cast<int>(i);
    return -1;
}

int Schema::binary_label_index() const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].kind == ColumnKind::BinaryLabel) return static_cast<int>(i);
    return -1;
}

std::vector<std::size_t> Schema::feature_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].kind == ColumnKind::Numeric || columns[i].kind == ColumnKind::Categorical)
            out.push_back(i);
    }
    return out;
}

void Schema::validate() const {
    std::unordered_set<std::string> names;
    int class_cols = 0, binary_cols = 0;
    for (const auto& c : columns) {
        if (!names.insert(c.name).second)
            throw Error(ErrorCode::SchemaMismatch, "duplicate column name " + c.name);
        if (c.kind == ColumnKind::ClassLabel) ++class_cols;
        if (c.kind == ColumnKind::BinaryLabel) ++binary_cols;
    }
    if (class_cols != 1)
        throw Error(ErrorCode::SchemaMismatch, "schema needs exactly one class-label column");
    if (binary_cols > 1)
        throw Error(ErrorCode::SchemaMismatch, "schema allows at most one binary-label column");
}

std::vector<std::string> RawTable::class_values() const {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string& c = class_of(r);
        if (seen.insert(c).second) out.push_back(c);
    }
    return out;
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string canonical_class_name(const std::string& raw) {
    static const std::unordered_map<std::string, std::string> aliases = {
        {"normal", "Normal"},         {"generic", "Generic"},
        {"exploits", "Exploits"},     {"fuzzers", "Fuzzers"},
        {"dos", "DoS"},               {"reconnaissance", "Reconnaissance"},
        {"analysis", "Analysis"},     {"backdoor", "Backdoor"},
        {"backdoors", "Backdoor"},    {"blackdoor", "Backdoor"},
        {"shellcode", "Shellcode"},   {"worms", "Worms"},
    };
    const std::string t = trim(raw);
    auto it = aliases.find(lower(t));
    return it == aliases.end() ? t : it->second;
}

bool is_normal_class(const std::string& name) { return lower(trim(name)) == "normal"; }

}  // namespace xidps
