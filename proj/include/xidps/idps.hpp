#ifndef XIDPS_IDPS_HPP
#define XIDPS_IDPS_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "xidps/ingest.hpp"
#include "xidps/model.hpp"
#include "xidps/types.hpp"

namespace xidps {

// One flow record from a simulated source. Logical timestamps only, strictly
// increasing within a source, so replays are exact.
struct FeedEvent {
    std::int64_t t = 0;
    std::string source;               // wifi8 | ioe | 6g
    std::vector<std::string> values;  // raw feature cells, encoder column order
    std::string id;                   // "<source>-<t>"
};

bool valid_source_tag(const std::string& tag);

// Signature over the attribution-selected attributes, minted from a flagged
// event. Numeric attributes carry a +-5% interval, categoricals the exact
// value.
struct ThreatPattern {
    struct Entry {
        std::string attribute;
        bool categorical = false;
        std::string category;  // categorical match
        double lo = 0.0;       // numeric interval
        double hi = 0.0;
    };

    std::string id;  // content hash of the signature
    std::vector<Entry> signature;
    std::string origin_node;
    std::int64_t created_t = 0;
};

// id-keyed store; re-inserting a known id is a no-op
class PatternDB {
public:
    bool insert(const ThreatPattern& pattern);  // false when already present
    bool contains(const std::string& id) const { return patterns_.count(id) != 0; }
    std::size_t size() const { return patterns_.size(); }

    // first pattern whose whole signature matches the event, nullptr otherwise
    const ThreatPattern* match(const std::vector<std::string>& feature_names,
                               const std::vector<std::string>& values) const;

    const std::map<std::string, ThreatPattern>& patterns() const { return patterns_; }

private:
    std::map<std::string, ThreatPattern> patterns_;
};

// pattern present in every node afterwards; sharing twice changes nothing
void share_pattern(const ThreatPattern& pattern, std::vector<PatternDB>& nodes);

struct Disposition {
    enum class Outcome { Pass, Alert, Block };
    enum class Reason { PatternMatch, MlAnomaly, Novelty, Clean };

    std::string event_id;
    std::int64_t t = 0;
    std::string source;
    Outcome outcome = Outcome::Pass;
    Reason reason = Reason::Clean;
    double score = 0.0;
    std::string pattern_id;  // matched or minted pattern, empty otherwise
};

const char* to_string(Disposition::Outcome outcome);
const char* to_string(Disposition::Reason reason);

// Everything the final layer needs from the intermediate one.
struct DetectorBundle {
    std::shared_ptr<const Model> multiclass;
    std::shared_ptr<const Model> binary;
    EncoderSpec encoder;
    std::vector<std::string> feature_columns;      // encoder feature columns, order fixed
    std::vector<std::string> selected_attributes;  // top-k signature vocabulary
};

// Globally ordered by (timestamp, source tag); total and deterministic.
std::vector<FeedEvent> merge_feeds(const std::vector<std::vector<FeedEvent>>& feeds);

struct EventResult {
    Disposition disposition;
    bool minted = false;
    ThreatPattern pattern;  // valid when minted
};

// Precedence: stored pattern match blocks; open-set novelty alerts and mints
// a pattern; a known attack class blocks; anything else passes. Encoding
// failures alert, fail-closed.
EventResult evaluate_event(const FeedEvent& event, const DetectorBundle& bundle,
                           const PatternDB& db, double tau);

struct SimSummary {
    std::size_t events = 0;
    std::map<std::string, std::size_t> by_outcome;
    std::map<std::string, std::size_t> by_reason;
    std::size_t patterns_minted = 0;
    std::size_t node_count = 0;
};

// Round-robin routing over node detectors; minted patterns are shared to all
// nodes immediately. Appends one JSON line per disposition to the alert log.
SimSummary run_simulation(const std::vector<std::vector<FeedEvent>>& feeds,
                          const DetectorBundle& bundle, int nodes, double tau,
                          const std::string& alert_log_path, const std::string& fingerprint);

// Feed files: CSV with leading t and source columns, then the dataset's
// feature columns in encoder order.
std::vector<FeedEvent> read_feed_csv(const std::string& path,
                                     const std::vector<std::string>& feature_columns);
void write_feed_csv(const std::string& path, const std::vector<FeedEvent>& events,
                    const std::vector<std::string>& feature_columns);

// feature column names (numeric + categorical) of an encoder, in order
std::vector<std::string> encoder_feature_columns(const EncoderSpec& spec);

}  // namespace xidps

#endif  // XIDPS_IDPS_HPP
