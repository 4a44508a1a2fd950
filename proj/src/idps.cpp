#include "xidps/idps.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "xidps/csv.hpp"
#include "xidps/errors.hpp"
#include "xidps/openset.hpp"

namespace xidps {

bool valid_source_tag(const std::string& tag) {
    return tag == "wifi8" || tag == "ioe" || tag == "6g";
}

namespace {

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

bool parse_number(const std::string& cell, double* out) {
    const char* b = cell.data();
    const char* e = b + cell.size();
    auto [ptr, ec] = std::from_chars(b, e, *out);
    return ec == std::errc() && ptr == e && !cell.empty();
}

std::string signature_id(const std::vector<ThreatPattern::Entry>& signature) {
    std::ostringstream key;
    key.precision(17);
    for (const auto& e : signature) {
        key << e.attribute << '|';
        if (e.categorical) key << '=' << e.category;
        else key << '[' << e.lo << ',' << e.hi << ']';
        key << ';';
    }
    return hex64(fnv1a(key.str()));
}

}  // namespace

bool PatternDB::insert(const ThreatPattern& pattern) {
    return patterns_.emplace(pattern.id, pattern).second;
}

const ThreatPattern* PatternDB::match(const std::vector<std::string>& feature_names,
                                      const std::vector<std::string>& values) const {
    std::unordered_map<std::string, std::size_t> index;
    index.reserve(feature_names.size());
    for (std::size_t i = 0; i < feature_names.size(); ++i) index.emplace(feature_names[i], i);

    for (const auto& [id, pattern] : patterns_) {
        bool all = true;
        for (const auto& entry : pattern.signature) {
            auto it = index.find(entry.attribute);
            if (it == index.end()) {
                all = false;
                break;
            }
            const std::string& cell = values[it->second];
            if (entry.categorical) {
                if (cell != entry.category) {
                    all = false;
                    break;
                }
            } else {
                double v;
                if (!parse_number(cell, &v) || v < entry.lo || v > entry.hi) {
                    all = false;
                    break;
                }
            }
        }
        if (all) return &pattern;
    }
    return nullptr;
}

void share_pattern(const ThreatPattern& pattern, std::vector<PatternDB>& nodes) {
    for (auto& db : nodes) db.insert(pattern);
}

const char* to_string(Disposition::Outcome outcome) {
    switch (outcome) {
        case Disposition::Outcome::Pass: return "pass";
        case Disposition::Outcome::Alert: return "alert";
        case Disposition::Outcome::Block: return "block";
    }
    return "?";
}

const char* to_string(Disposition::Reason reason) {
    switch (reason) {
        case Disposition::Reason::PatternMatch: return "pattern_match";
        case Disposition::Reason::MlAnomaly: return "ml_anomaly";
        case Disposition::Reason::Novelty: return "novelty";
        case Disposition::Reason::Clean: return "clean";
    }
    return "?";
}

std::vector<FeedEvent> merge_feeds(const std::vector<std::vector<FeedEvent>>& feeds) {
    for (const auto& feed : feeds) {
        std::unordered_map<std::string, std::int64_t> last_t;
        for (const auto& e : feed) {
            auto [it, first] = last_t.emplace(e.source, e.t);
            if (!first) {
                if (e.t <= it->second)
                    throw Error(ErrorCode::UnorderedFeed,
                                "source " + e.source + " timestamp " + std::to_string(e.t) +
                                    " not increasing");
                it->second = e.t;
            }
        }
    }

    std::vector<FeedEvent> merged;
    for (const auto& feed : feeds) merged.insert(merged.end(), feed.begin(), feed.end());
    std::stable_sort(merged.begin(), merged.end(), [](const FeedEvent& a, const FeedEvent& b) {
        if (a.t != b.t) return a.t < b.t;
        return a.source < b.source;
    });
    for (std::size_t i = 1; i < merged.size(); ++i) {
        if (merged[i].t == merged[i - 1].t && merged[i].source == merged[i - 1].source)
            throw Error(ErrorCode::UnorderedFeed,
                        "duplicate (t, source) = (" + std::to_string(merged[i].t) + ", " +
                            merged[i].source + ") across feeds");
    }
    return merged;
}

namespace {

// encodes raw feature cells with the same one-hot / min-max rules the
// training matrices used
Vector encode_event(const EncoderSpec& spec, const std::vector<std::string>& values) {
    std::size_t cat_i = 0, num_i = 0, width = 0;
    for (const auto& c : spec.categoricals) width += c.vocabulary.size();
    width += spec.numerics.size();

    Vector out = Vector::Zero(static_cast<Eigen::Index>(width));
    std::size_t cell = 0, at = 0;
    for (const auto& col : spec.source_schema.columns) {
        if (col.kind == ColumnKind::Categorical) {
            const auto& vocab = spec.categoricals[cat_i].vocabulary;
            const std::string& v = values[cell];
            for (std::size_t j = 0; j < vocab.size(); ++j) {
                if (vocab[j] == v) {
                    out[static_cast<Eigen::Index>(at + j)] = 1.0;
                    break;
                }
            }
            at += vocab.size();
            ++cat_i;
            ++cell;
        } else if (col.kind == ColumnKind::Numeric) {
            const auto& num = spec.numerics[num_i];
            double v;
            if (!parse_number(values[cell], &v))
                throw Error(ErrorCode::EncodingError,
                            "column " + col.name + " value \"" + values[cell] + "\"");
            out[static_cast<Eigen::Index>(at)] =
                std::clamp((v - num.min) / (num.max - num.min), 0.0, 1.0);
            ++at;
            ++num_i;
            ++cell;
        }
    }
    if (cell != values.size())
        throw Error(ErrorCode::EncodingError, "event arity differs from encoder schema");
    return out;
}

ThreatPattern mint_pattern(const FeedEvent& event, const DetectorBundle& bundle,
                           const std::string& origin_node) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < bundle.feature_columns.size(); ++i)
        index.emplace(bundle.feature_columns[i], i);
    std::unordered_set<std::string> categorical;
    for (const auto& c : bundle.encoder.categoricals) categorical.insert(c.name);

    ThreatPattern pattern;
    for (const auto& attr : bundle.selected_attributes) {
        auto it = index.find(attr);
        if (it == index.end()) continue;
        const std::string& cell = event.values[it->second];
        ThreatPattern::Entry entry;
        entry.attribute = attr;
        if (categorical.count(attr)) {
            entry.categorical = true;
            entry.category = cell;
        } else {
            double v = 0.0;
            parse_number(cell, &v);
            const double slack = std::abs(v) * 0.05;
            entry.lo = v - slack;
            entry.hi = v + slack;
        }
        pattern.signature.push_back(std::move(entry));
    }
    if (pattern.signature.empty())
        throw Error(ErrorCode::ConfigError,
                    "none of the selected attributes appear in the feed columns");
    pattern.id = signature_id(pattern.signature);
    pattern.origin_node = origin_node;
    pattern.created_t = event.t;
    return pattern;
}

}  // namespace

EventResult evaluate_event(const FeedEvent& event, const DetectorBundle& bundle,
                           const PatternDB& db, double tau) {
    EventResult result;
    result.disposition.event_id = event.id;
    result.disposition.t = event.t;
    result.disposition.source = event.source;

    // 1: shared threat intelligence
    if (const ThreatPattern* hit = db.match(bundle.feature_columns, event.values)) {
        result.disposition.outcome = Disposition::Outcome::Block;
        result.disposition.reason = Disposition::Reason::PatternMatch;
        result.disposition.score = 1.0;
        result.disposition.pattern_id = hit->id;
        return result;
    }

    Vector x;
    try {
        x = encode_event(bundle.encoder, event.values);
    } catch (const Error&) {
        // fail closed on garbled traffic
        result.disposition.outcome = Disposition::Outcome::Alert;
        result.disposition.reason = Disposition::Reason::MlAnomaly;
        result.disposition.score = 1.0;
        return result;
    }

    const OpenSetDecision decision = classify_openset(*bundle.multiclass, *bundle.binary, x, tau);

    int normal_index = -1;
    const auto& classes = bundle.multiclass->classes();
    for (std::size_t c = 0; c < classes.size(); ++c)
        if (is_normal_class(classes[c])) normal_index = static_cast<int>(c);
    const Vector scores = predict_scores(*bundle.multiclass, x);
    const double anomaly_score = normal_index >= 0 ? 1.0 - scores[normal_index]
                                                   : scores.maxCoeff();

    // 2: unseen pattern -> alert and mint intelligence
    if (decision.novel) {
        result.disposition.outcome = Disposition::Outcome::Alert;
        result.disposition.reason = Disposition::Reason::Novelty;
        result.disposition.score = std::max(decision.novelty, decision.binary_attack);
        result.minted = true;
        result.pattern = mint_pattern(event, bundle, "");
        result.disposition.pattern_id = result.pattern.id;
        return result;
    }

    // 3: known attack class
    if (!is_normal_class(classes[static_cast<std::size_t>(decision.label_index)])) {
        result.disposition.outcome = Disposition::Outcome::Block;
        result.disposition.reason = Disposition::Reason::MlAnomaly;
        result.disposition.score = anomaly_score;
        return result;
    }

    // 4: pass the user normally
    result.disposition.outcome = Disposition::Outcome::Pass;
    result.disposition.reason = Disposition::Reason::Clean;
    result.disposition.score = anomaly_score;
    return result;
}

SimSummary run_simulation(const std::vector<std::vector<FeedEvent>>& feeds,
                          const DetectorBundle& bundle, int nodes, double tau,
                          const std::string& alert_log_path, const std::string& fingerprint) {
    if (nodes < 1) throw Error(ErrorCode::ConfigError, "node count must be >= 1");
    const std::vector<FeedEvent> merged = merge_feeds(feeds);

    std::ofstream log(alert_log_path, std::ios::binary | std::ios::trunc);
    if (!log) throw Error(ErrorCode::IoError, "cannot open " + alert_log_path);

    std::vector<PatternDB> dbs(static_cast<std::size_t>(nodes));
    SimSummary summary;
    summary.node_count = static_cast<std::size_t>(nodes);

    for (std::size_t i = 0; i < merged.size(); ++i) {
        const auto node = i % static_cast<std::size_t>(nodes);
        EventResult result = evaluate_event(merged[i], bundle, dbs[node], tau);
        if (result.minted) {
            result.pattern.origin_node = "node-" + std::to_string(node);
            if (!dbs[node].contains(result.pattern.id)) ++summary.patterns_minted;
            share_pattern(result.pattern, dbs);
        }

        const Disposition& d = result.disposition;
        nlohmann::json line = {{"event_id", d.event_id}, {"t", d.t},
                               {"source", d.source},     {"outcome", to_string(d.outcome)},
                               {"reason", to_string(d.reason)},
                               {"score", d.score},       {"fp", fingerprint}};
        if (!d.pattern_id.empty()) line["pattern_id"] = d.pattern_id;
        log << line.dump() << "\n";

        ++summary.events;
        ++summary.by_outcome[to_string(d.outcome)];
        ++summary.by_reason[to_string(d.reason)];
    }
    return summary;
}

std::vector<FeedEvent> read_feed_csv(const std::string& path,
                                     const std::vector<std::string>& feature_columns) {
    auto rows = csv::read_file(path);
    if (rows.empty()) throw Error(ErrorCode::SchemaMismatch, "feed file has no header: " + path);
    const auto& header = rows.front();
    if (header.size() != feature_columns.size() + 2 || header[0] != "t" || header[1] != "source")
        throw Error(ErrorCode::SchemaMismatch, "feed header must be t,source,<feature columns>");
    for (std::size_t i = 0; i < feature_columns.size(); ++i) {
        if (header[i + 2] != feature_columns[i])
            throw Error(ErrorCode::SchemaMismatch,
                        "feed column " + header[i + 2] + " does not match expected " +
                            feature_columns[i]);
    }

    std::vector<FeedEvent> events;
    events.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size())
            throw Error(ErrorCode::ArityMismatch, "feed row width", r - 1);
        FeedEvent e;
        double t;
        if (!parse_number(row[0], &t))
            throw Error(ErrorCode::UnparseableNumber, "feed timestamp \"" + row[0] + "\"", r - 1);
        e.t = static_cast<std::int64_t>(t);
        e.source = row[1];
        if (!valid_source_tag(e.source))
            throw Error(ErrorCode::SchemaMismatch, "unknown source tag " + e.source);
        e.values.assign(row.begin() + 2, row.end());
        e.id = e.source + "-" + std::to_string(e.t);
        events.push_back(std::move(e));
    }
    return events;
}

void write_feed_csv(const std::string& path, const std::vector<FeedEvent>& events,
                    const std::vector<std::string>& feature_columns) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::vector<std::string> header = {"t", "source"};
    header.insert(header.end(), feature_columns.begin(), feature_columns.end());
    out << csv::join_row(header) << "\n";
    for (const auto& e : events) {
        std::vector<std::string> row = {std::to_string(e.t), e.source};
        row.insert(row.end(), e.values.begin(), e.values.end());
        out << csv::join_row(row) << "\n";
    }
}

std::vector<std::string> encoder_feature_columns(const EncoderSpec& spec) {
    std::vector<std::string> out;
    for (const auto& col : spec.source_schema.columns) {
        if (col.kind == ColumnKind::Numeric || col.kind == ColumnKind::Categorical)
            out.push_back(col.name);
    }
    return out;
}

}  // namespace xidps
