#include "xidps/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "xidps/csv.hpp"
#include "xidps/errors.hpp"
#include "xidps/rng.hpp"

namespace xidps {

namespace {

// Official UNSW-NB15 training-set layout.
const std::vector<Column>& unsw_columns() {
    static const std::vector<Column> cols = {
        {"id", ColumnKind::Ignore},
        {"dur", ColumnKind::Numeric},
        {"proto", ColumnKind::Categorical},
        {"service", ColumnKind::Categorical},
        {"state", ColumnKind::Categorical},
        {"spkts", ColumnKind::Numeric},
        {"dpkts", ColumnKind::Numeric},
        {"sbytes", ColumnKind::Numeric},
        {"dbytes", ColumnKind::Numeric},
        {"rate", ColumnKind::Numeric},
        {"sttl", ColumnKind::Numeric},
        {"dttl", ColumnKind::Numeric},
        {"sload", ColumnKind::Numeric},
        {"dload", ColumnKind::Numeric},
        {"sloss", ColumnKind::Numeric},
        {"dloss", ColumnKind::Numeric},
        {"sinpkt", ColumnKind::Numeric},
        {"dinpkt", ColumnKind::Numeric},
        {"sjit", ColumnKind::Numeric},
        {"djit", ColumnKind::Numeric},
        {"swin", ColumnKind::Numeric},
        {"stcpb", ColumnKind::Numeric},
        {"dtcpb", ColumnKind::Numeric},
        {"dwin", ColumnKind::Numeric},
        {"tcprtt", ColumnKind::Numeric},
        {"synack", ColumnKind::Numeric},
        {"ackdat", ColumnKind::Numeric},
        {"smean", ColumnKind::Numeric},
        {"dmean", ColumnKind::Numeric},
        {"trans_depth", ColumnKind::Numeric},
        {"response_body_len", ColumnKind::Numeric},
        {"ct_srv_src", ColumnKind::Numeric},
        {"ct_state_ttl", ColumnKind::Numeric},
        {"ct_dst_ltm", ColumnKind::Numeric},
        {"ct_src_dport_ltm", ColumnKind::Numeric},
        {"ct_dst_sport_ltm", ColumnKind::Numeric},
        {"ct_dst_src_ltm", ColumnKind::Numeric},
        {"is_ftp_login", ColumnKind::Numeric},
        {"ct_ftp_cmd", ColumnKind::Numeric},
        {"ct_flw_http_mthd", ColumnKind::Numeric},
        {"ct_src_ltm", ColumnKind::Numeric},
        {"ct_srv_dst", ColumnKind::Numeric},
        {"is_sm_ips_ports", ColumnKind::Numeric},
        {"attack_cat", ColumnKind::ClassLabel},
        {"label", ColumnKind::BinaryLabel},
    };
    return cols;
}

// Official NSL-KDD field list: 41 features, then label and difficulty.
const std::vector<Column>& nslkdd_columns() {
    static const std::vector<Column> cols = {
        {"duration", ColumnKind::Numeric},
        {"protocol_type", ColumnKind::Categorical},
        {"service", ColumnKind::Categorical},
        {"flag", ColumnKind::Categorical},
        {"src_bytes", ColumnKind::Numeric},
        {"dst_bytes", ColumnKind::Numeric},
        {"land", ColumnKind::Numeric},
        {"wrong_fragment", ColumnKind::Numeric},
        {"urgent", ColumnKind::Numeric},
        {"hot", ColumnKind::Numeric},
        {"num_failed_logins", ColumnKind::Numeric},
        {"logged_in", ColumnKind::Numeric},
        {"num_compromised", ColumnKind::Numeric},
        {"root_shell", ColumnKind::Numeric},
        {"su_attempted", ColumnKind::Numeric},
        {"num_root", ColumnKind::Numeric},
        {"num_file_creations", ColumnKind::Numeric},
        {"num_shells", ColumnKind::Numeric},
        {"num_access_files", ColumnKind::Numeric},
        {"num_outbound_cmds", ColumnKind::Numeric},
        {"is_host_login", ColumnKind::Numeric},
        {"is_guest_login", ColumnKind::Numeric},
        {"count", ColumnKind::Numeric},
        {"srv_count", ColumnKind::Numeric},
        {"serror_rate", ColumnKind::Numeric},
        {"srv_serror_rate", ColumnKind::Numeric},
        {"rerror_rate", ColumnKind::Numeric},
        {"srv_rerror_rate", ColumnKind::Numeric},
        {"same_srv_rate", ColumnKind::Numeric},
        {"diff_srv_rate", ColumnKind::Numeric},
        {"srv_diff_host_rate", ColumnKind::Numeric},
        {"dst_host_count", ColumnKind::Numeric},
        {"dst_host_srv_count", ColumnKind::Numeric},
        {"dst_host_same_srv_rate", ColumnKind::Numeric},
        {"dst_host_diff_srv_rate", ColumnKind::Numeric},
        {"dst_host_same_src_port_rate", ColumnKind::Numeric},
        {"dst_host_srv_diff_host_rate", ColumnKind::Numeric},
        {"dst_host_serror_rate", ColumnKind::Numeric},
        {"dst_host_srv_serror_rate", ColumnKind::Numeric},
        {"dst_host_rerror_rate", ColumnKind::Numeric},
        {"dst_host_srv_rerror_rate", ColumnKind::Numeric},
        {"label", ColumnKind::ClassLabel},
        {"difficulty", ColumnKind::Ignore},
    };
    return cols;
}

bool parse_number(const std::string& cell, double* out) {
    const char* b = cell.data();
    const char* e = b + cell.size();
    auto [ptr, ec] = std::from_chars(b, e, *out);
    return ec == std::errc() && ptr == e && cell.size() > 0;
}

void validate_rows(RawTable& table, std::size_t header_offset,
                   std::vector<std::pair<std::string, std::string>>* renames) {
    const auto& cols = table.schema.columns;
    std::unordered_set<std::string> renamed;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        auto& row = table.rows[r];
        if (row.size() != cols.size())
            throw Error(ErrorCode::ArityMismatch,
                        "expected " + std::to_string(cols.size()) + " cells, got " +
                            std::to_string(row.size()),
                        r + header_offset);
        for (std::size_t c = 0; c < cols.size(); ++c) {
            switch (cols[c].kind) {
                case ColumnKind::Numeric:
                case ColumnKind::BinaryLabel: {
                    double v;
                    if (!parse_number(row[c], &v))
                        throw Error(ErrorCode::UnparseableNumber,
                                    "column " + cols[c].name + " value \"" + row[c] + "\"",
                                    r + header_offset);
                    break;
                }
                case ColumnKind::ClassLabel: {
                    std::string canonical = canonical_class_name(row[c]);
                    if (renames && canonical != row[c] && renamed.insert(row[c]).second)
                        renames->emplace_back(row[c], canonical);
                    row[c] = std::move(canonical);
                    break;
                }
                default:
                    break;
            }
        }
    }
}

std::uint64_t class_seed(std::uint64_t seed, std::size_t class_rank) {
    return seed * 0x9e3779b97f4a7c15ULL + class_rank + 1;
}

}  // namespace

RawTable load_unsw(const std::string& path,
                   std::vector<std::pair<std::string, std::string>>* renames) {
    auto rows = csv::read_file(path);
    if (rows.empty()) throw Error(ErrorCode::MissingColumn, "file has no header row: " + path);

    const auto& layout = unsw_columns();
    std::unordered_map<std::string, ColumnKind> kind_by_name;
    for (const auto& c : layout) kind_by_name.emplace(c.name, c.kind);

    const auto& header = rows.front();
    std::unordered_set<std::string> seen;
    Schema schema;
    for (const auto& name : header) {
        auto it = kind_by_name.find(name);
        if (it == kind_by_name.end())
            throw Error(ErrorCode::SchemaMismatch, "unexpected column " + name);
        if (!seen.insert(name).second)
            throw Error(ErrorCode::SchemaMismatch, "duplicate column " + name);
        schema.columns.push_back({name, it->second});
    }
    for (const auto& c : layout) {
        if (!seen.count(c.name))
            throw Error(ErrorCode::MissingColumn, "header lacks " + c.name);
    }
    schema.validate();

    RawTable table;
    table.schema = std::move(schema);
    table.rows.assign(rows.begin() + 1, rows.end());
    table.finalize();
    validate_rows(table, 0, renames);
    return table;
}

RawTable load_nslkdd(const std::string& path,
                     std::vector<std::pair<std::string, std::string>>* renames) {
    auto rows = csv::read_file(path);
    RawTable table;
    table.schema.columns = nslkdd_columns();
    table.schema.validate();
    table.rows = std::move(rows);
    table.finalize();
    validate_rows(table, 0, renames);
    return table;
}

EncoderSpec fit_encoder(const RawTable& table) {
    if (table.rows.empty()) throw Error(ErrorCode::EmptyTable, "cannot fit encoder on empty table");
    EncoderSpec spec;
    spec.source_schema = table.schema;

    for (std::size_t c = 0; c < table.schema.columns.size(); ++c) {
        const auto& col = table.schema.columns[c];
        if (col.kind == ColumnKind::Categorical) {
            EncoderSpec::CategoricalColumn cat;
            cat.name = col.name;
            std::unordered_set<std::string> seen;
            for (const auto& row : table.rows) {
                if (seen.insert(row[c]).second) cat.vocabulary.push_back(row[c]);
            }
            spec.categoricals.push_back(std::move(cat));
        } else if (col.kind == ColumnKind::Numeric) {
            EncoderSpec::NumericColumn num;
            num.name = col.name;
            double lo = std::numeric_limits<double>::infinity();
            double hi = -std::numeric_limits<double>::infinity();
            for (const auto& row : table.rows) {
                double v;
                parse_number(row[c], &v);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (hi <= lo) hi = lo + 1.0;  // constant column
            num.min = lo;
            num.max = hi;
            spec.numerics.push_back(std::move(num));
        }
    }
    return spec;
}

EncodedMatrix apply_encoder(const RawTable& table, const EncoderSpec& spec) {
    const auto& cols = table.schema.columns;
    if (cols.size() != spec.source_schema.columns.size())
        throw Error(ErrorCode::SchemaMismatch, "table arity differs from encoder source schema");
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (cols[c].name != spec.source_schema.columns[c].name ||
            cols[c].kind != spec.source_schema.columns[c].kind)
            throw Error(ErrorCode::SchemaMismatch,
                        "column " + cols[c].name + " differs from encoder source schema");
    }

    EncodedMatrix out;
    struct ColPlan {
        std::size_t src;                       // source column index
        bool categorical;
        std::size_t first_feature;             // offset into feature vector
        const EncoderSpec::CategoricalColumn* cat = nullptr;
        const EncoderSpec::NumericColumn* num = nullptr;
        std::unordered_map<std::string, std::size_t> vocab_index;
    };
    std::vector<ColPlan> plan;
    std::size_t cat_i = 0, num_i = 0, width = 0;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (cols[c].kind == ColumnKind::Categorical) {
            ColPlan p;
            p.src = c;
            p.categorical = true;
            p.first_feature = width;
            p.cat = &spec.categoricals[cat_i++];
            for (std::size_t v = 0; v < p.cat->vocabulary.size(); ++v) {
                p.vocab_index.emplace(p.cat->vocabulary[v], v);
                out.feature_names.push_back(cols[c].name + "=" + p.cat->vocabulary[v]);
                out.source_columns.push_back(cols[c].name);
            }
            width += p.cat->vocabulary.size();
            plan.push_back(std::move(p));
        } else if (cols[c].kind == ColumnKind::Numeric) {
            ColPlan p;
            p.src = c;
            p.categorical = false;
            p.first_feature = width;
            p.num = &spec.numerics[num_i++];
            out.feature_names.push_back(cols[c].name);
            out.source_columns.push_back(cols[c].name);
            width += 1;
            plan.push_back(std::move(p));
        }
    }

    const std::size_t n = table.rows.size();
    out.values = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(width));

    const int class_col = table.schema.class_label_index();
    const int binary_col = table.schema.binary_label_index();
    std::unordered_map<std::string, int> class_index;
    out.labels.resize(n);
    out.binary.resize(n);

    for (std::size_t r = 0; r < n; ++r) {
        const auto& row = table.rows[r];
        for (const auto& p : plan) {
            if (p.categorical) {
                auto it = p.vocab_index.find(row[p.src]);
                // unseen category stays all-zeros
                if (it != p.vocab_index.end())
                    out.values(static_cast<Eigen::Index>(r),
                               static_cast<Eigen::Index>(p.first_feature + it->second)) = 1.0;
            } else {
                double v;
                if (!parse_number(row[p.src], &v))
                    throw Error(ErrorCode::UnparseableNumber,
                                "column " + cols[p.src].name + " value \"" + row[p.src] + "\"", r);
                double scaled = (v - p.num->min) / (p.num->max - p.num->min);
                out.values(static_cast<Eigen::Index>(r),
                           static_cast<Eigen::Index>(p.first_feature)) =
                    std::clamp(scaled, 0.0, 1.0);
            }
        }
        const std::string& cls = row[static_cast<std::size_t>(class_col)];
        auto [it, inserted] = class_index.emplace(cls, static_cast<int>(out.class_names.size()));
        if (inserted) out.class_names.push_back(cls);
        out.labels[r] = it->second;

        if (binary_col >= 0) {
            double b;
            parse_number(row[static_cast<std::size_t>(binary_col)], &b);
            out.binary[r] = b != 0.0 ? 1 : 0;
        } else {
            out.binary[r] = is_normal_class(cls) ? 0 : 1;
        }
    }
    return out;
}

std::vector<std::size_t> EncodedMatrix::columns_of(
    const std::vector<std::string>& attributes) const {
    std::unordered_set<std::string> wanted(attributes.begin(), attributes.end());
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < source_columns.size(); ++j)
        if (wanted.count(source_columns[j])) cols.push_back(j);
    return cols;
}

EncodedMatrix EncodedMatrix::select_columns(const std::vector<std::size_t>& cols) const {
    EncodedMatrix out;
    out.class_names = class_names;
    out.labels = labels;
    out.binary = binary;
    out.values.resize(values.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        out.feature_names.push_back(feature_names[cols[j]]);
        out.source_columns.push_back(source_columns[cols[j]]);
        out.values.col(static_cast<Eigen::Index>(j)) =
            values.col(static_cast<Eigen::Index>(cols[j]));
    }
    return out;
}

std::pair<RawTable, RawTable> stratified_split(const RawTable& table, double test_fraction,
                                               std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw Error(ErrorCode::ConfigError, "test_fraction must lie in (0,1)");

    // class -> row indices, classes kept in first-occurrence order
    std::vector<std::string> order;
    std::unordered_map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        const std::string& c = table.class_of(r);
        auto [it, inserted] = by_class.try_emplace(c);
        if (inserted) order.push_back(c);
        it->second.push_back(r);
    }
    for (const auto& c : order) {
        if (by_class[c].size() < 2)
            throw Error(ErrorCode::ClassTooSmall, "class " + c + " has fewer than 2 rows");
    }

    std::vector<char> in_test(table.n_rows(), 0);
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        auto& idx = by_class[order[rank]];
        Rng rng(class_seed(seed, rank));
        rng.shuffle(idx);
        const auto take = static_cast<std::size_t>(
            std::llround(test_fraction * static_cast<double>(idx.size())));
        for (std::size_t i = 0; i < take && i < idx.size(); ++i) in_test[idx[i]] = 1;
    }

    RawTable train, test;
    train.schema = table.schema;
    test.schema = table.schema;
    for (std::size_t r = 0; r < table.n_rows(); ++r)
        (in_test[r] ? test : train).rows.push_back(table.rows[r]);
    train.finalize();
    test.finalize();
    return {std::move(train), std::move(test)};
}

RawTable filter_classes(const RawTable& table, const std::vector<std::string>& keep,
                        std::vector<std::string>* warnings) {
    if (keep.empty()) throw Error(ErrorCode::EmptyData, "keep set is empty");
    std::unordered_set<std::string> wanted(keep.begin(), keep.end());

    std::unordered_set<std::string> present;
    RawTable out;
    out.schema = table.schema;
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        const std::string& c = table.class_of(r);
        if (wanted.count(c)) {
            out.rows.push_back(table.rows[r]);
            present.insert(c);
        }
    }
    if (warnings) {
        for (const auto& k : keep)
            if (!present.count(k))
                warnings->push_back("UnknownClass: class " + k + " not present in table");
    }
    out.finalize();
    return out;
}

std::string EncoderSpec::to_json() const {
    nlohmann::json j;
    j["format"] = "xidps-encoder";
    j["version"] = 1;
    nlohmann::json schema = nlohmann::json::array();
    for (const auto& c : source_schema.columns) {
        const char* kind = "numeric";
        switch (c.kind) {
            case ColumnKind::Numeric: kind = "numeric"; break;
            case ColumnKind::Categorical: kind = "categorical"; break;
            case ColumnKind::ClassLabel: kind = "class-label"; break;
            case ColumnKind::BinaryLabel: kind = "binary-label"; break;
            case ColumnKind::Ignore: kind = "ignore"; break;
        }
        schema.push_back({{"name", c.name}, {"kind", kind}});
    }
    j["schema"] = std::move(schema);
    nlohmann::json cats = nlohmann::json::array();
    for (const auto& c : categoricals)
        cats.push_back({{"name", c.name}, {"vocabulary", c.vocabulary}});
    j["categoricals"] = std::move(cats);
    nlohmann::json nums = nlohmann::json::array();
    for (const auto& c : numerics)
        nums.push_back({{"name", c.name}, {"min", c.min}, {"max", c.max}});
    j["numerics"] = std::move(nums);
    j["unseen_policy"] = "zeros";
    return j.dump(2);
}

EncoderSpec EncoderSpec::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("format", "") != "xidps-encoder")
        throw Error(ErrorCode::SchemaMismatch, "not an encoder document");
    EncoderSpec spec;
    for (const auto& c : j.at("schema")) {
        const std::string kind = c.at("kind");
        ColumnKind k = ColumnKind::Numeric;
        if (kind == "numeric") k = ColumnKind::Numeric;
        else if (kind == "categorical") k = ColumnKind::Categorical;
        else if (kind == "class-label") k = ColumnKind::ClassLabel;
        else if (kind == "binary-label") k = ColumnKind::BinaryLabel;
        else if (kind == "ignore") k = ColumnKind::Ignore;
        else throw Error(ErrorCode::SchemaMismatch, "unknown column kind " + kind);
        spec.source_schema.columns.push_back({c.at("name"), k});
    }
    for (const auto& c : j.at("categoricals")) {
        EncoderSpec::CategoricalColumn cat;
        cat.name = c.at("name");
        cat.vocabulary = c.at("vocabulary").get<std::vector<std::string>>();
        if (cat.vocabulary.empty())
            throw Error(ErrorCode::SchemaMismatch, "empty vocabulary for " + cat.name);
        spec.categoricals.push_back(std::move(cat));
    }
    for (const auto& c : j.at("numerics")) {
        EncoderSpec::NumericColumn num;
        num.name = c.at("name");
        num.min = c.at("min");
        num.max = c.at("max");
        if (!(num.min <= num.max))
            throw Error(ErrorCode::SchemaMismatch, "min > max for " + num.name);
        spec.numerics.push_back(num);
    }
    return spec;
}

}  // namespace xidps
