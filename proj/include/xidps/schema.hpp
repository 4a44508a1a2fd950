#ifndef XIDPS_SCHEMA_HPP
#define XIDPS_SCHEMA_HPP

#include <string>
#include <vector>

namespace xidps {

enum class ColumnKind {
    Numeric,
    Categorical,
    ClassLabel,
    BinaryLabel,
    Ignore,
};

struct Column {
    std::string name;
    ColumnKind kind;
};

// Column layout of a flow dataset. Exactly one class-label column, at most
// one binary-label column, names unique.
struct Schema {
    std::vector<Column> columns;

    std::size_t size() const { return columns.size(); }
    int index_of(const std::string& name) const;
    int class_label_index() const;
    int binary_label_index() const;  // -1 when absent
    std::vector<std::size_t> feature_indices() const;  // numeric + categorical

    void validate() const;
};

// Labeled rows of raw cell text, one string per schema column.
struct RawTable {
    Schema schema;
    std::vector<std::vector<std::string>> rows;

    std::size_t n_rows() const { return rows.size(); }
    const std::string& class_of(std::size_t row) const {
        return rows[row][static_cast<std::size_t>(class_idx_)];
    }

    // cached during construction
    int class_idx_ = -1;
    void finalize() { class_idx_ = schema.class_label_index(); }

    // distinct class labels in first-occurrence order
    std::vector<std::string> class_values() const;
};

// Dataset spellings mapped onto one canonical vocabulary ("Dos" -> "DoS",
// "Blackdoor"/"Backdoors" -> "Backdoor"). Unknown names pass through trimmed.
std::string canonical_class_name(const std::string& raw);

bool is_normal_class(const std::string& name);

}  // namespace xidps

#endif  // XIDPS_SCHEMA_HPP
