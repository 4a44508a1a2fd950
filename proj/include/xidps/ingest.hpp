#ifndef XIDPS_INGEST_HPP
#define XIDPS_INGEST_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "xidps/schema.hpp"
#include "xidps/types.hpp"

namespace xidps {

// UNSW-NB15 training-set CSV (header row, official 45-column layout).
// id is ignored, attack_cat is the class label, label the binary label,
// proto/service/state categorical, everything else numeric. Class names are
// canonicalized; renames, when requested, records each applied mapping.
RawTable load_unsw(const std::string& path,
                   std::vector<std::pair<std::string, std::string>>* renames = nullptr);

// NSL-KDD file: headerless, 41 features + label + difficulty.
RawTable load_nslkdd(const std::string& path,
                     std::vector<std::pair<std::string, std::string>>* renames = nullptr);

enum class UnseenPolicy { Zeros };

// Fitted per-column encoding state, serializable for reproducible reuse.
struct EncoderSpec {
    struct CategoricalColumn {
        std::string name;
        std::vector<std::string> vocabulary;  // first-occurrence order
    };
    struct NumericColumn {
        std::string name;
        double min = 0.0;
        double max = 1.0;
    };

    Schema source_schema;
    std::vector<CategoricalColumn> categoricals;  // in schema order
    std::vector<NumericColumn> numerics;          // in schema order
    UnseenPolicy unseen_policy = UnseenPolicy::Zeros;

    std::string to_json() const;
    static EncoderSpec from_json(const std::string& text);
};

// Fully numeric view of a table: one-hot expanded categoricals, min-max
// scaled numerics, per-row class and binary labels.
struct EncodedMatrix {
    std::vector<std::string> feature_names;   // "<column>=<value>" for one-hot
    std::vector<std::string> source_columns;  // originating attribute per feature
    Matrix values;                            // rows x features
    std::vector<std::string> class_names;     // first-occurrence order
    std::vector<int> labels;                  // index into class_names, per row
    std::vector<std::uint8_t> binary;         // 0 = Normal, per row

    std::size_t n_rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t n_features() const { return feature_names.size(); }
    const std::string& label_name(std::size_t row) const {
        return class_names[static_cast<std::size_t>(labels[row])];
    }

    // column indices belonging to the given source attributes, in matrix order
    std::vector<std::size_t> columns_of(const std::vector<std::string>& attributes) const;

    // copy with only the given columns kept
    EncodedMatrix select_columns(const std::vector<std::size_t>& cols) const;
};

// Vocabularies in first-occurrence order; numeric bounds from these rows
// only. A constant numeric column v gets bounds (v, v+1).
EncoderSpec fit_encoder(const RawTable& table);

EncodedMatrix apply_encoder(const RawTable& table, const EncoderSpec& spec);

// Deterministic stratified partition; per-class test counts within +-1 row
// of test_fraction * class size.
std::pair<RawTable, RawTable> stratified_split(const RawTable& table, double test_fraction,
                                               std::uint64_t seed);

// Rows whose class label is in keep, original order. Entries of keep absent
// from the table are reported through warnings (when given), not thrown.
RawTable filter_classes(const RawTable& table, const std::vector<std::string>& keep,
                        std::vector<std::string>* warnings = nullptr);

}  // namespace xidps

#endif  // XIDPS_INGEST_HPP
