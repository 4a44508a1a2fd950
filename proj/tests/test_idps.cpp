#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "xidps/errors.hpp"
#include "xidps/idps.hpp"
#include "xidps/ingest.hpp"
#include "xidps/sample_gen.hpp"
#include "test_util.hpp"

using namespace xidps;

namespace {

FeedEvent make_event(std::int64_t t, const std::string& source,
                     std::vector<std::string> values) {
    FeedEvent e;
    e.t = t;
    e.source = source;
    e.values = std::move(values);
    e.id = source + "-" + std::to_string(t);
    return e;
}

// two-feature toy world: proto (tcp|udp) and size scaled over [0,10];
// multiclass stump says DoS for size > 5, binary agrees
DetectorBundle toy_bundle() {
    DetectorBundle bundle;
    bundle.encoder.source_schema.columns = {{"proto", ColumnKind::Categorical},
                                            {"size", ColumnKind::Numeric},
                                            {"cat", ColumnKind::ClassLabel}};
    bundle.encoder.categoricals.push_back({"proto", {"tcp", "udp"}});
    bundle.encoder.numerics.push_back({"size", 0.0, 10.0});
    bundle.feature_columns = {"proto", "size"};
    bundle.selected_attributes = {"proto", "size"};

    // encoded layout: proto=tcp, proto=udp, size
    auto mk = [](double ln, double la, double rn, double ra) {
        Vector l(2), r(2);
        l << ln, la;
        r << rn, ra;
        return std::make_pair(l, r);
    };
    auto [ml, mr] = mk(0.9, 0.1, 0.15, 0.85);
    bundle.multiclass = std::make_shared<Stump>(
        3, std::vector<std::string>{"Normal", "DoS"}, 2, 0.5, ml, mr);
    auto [bl, br] = mk(0.95, 0.05, 0.1, 0.9);
    bundle.binary = std::make_shared<Stump>(
        3, std::vector<std::string>{"Normal", "Attack"}, 2, 0.5, bl, br);
    return bundle;
}

}  // namespace

TEST_CASE("merge_feeds: interleaving and tie order") {
    std::vector<std::vector<FeedEvent>> feeds(2);
    feeds[0] = {make_event(1, "wifi8", {"a"}), make_event(3, "wifi8", {"b"})};
    feeds[1] = {make_event(2, "ioe", {"c"})};
    auto merged = merge_feeds(feeds);
    REQUIRE(merged.size() == 3);
    CHECK(merged[0].t == 1);
    CHECK(merged[1].t == 2);
    CHECK(merged[2].t == 3);

    feeds[1] = {make_event(1, "ioe", {"c"})};
    merged = merge_feeds(feeds);
    CHECK(merged[0].source == "ioe");  // "ioe" < "wifi8" at equal t
    CHECK(merged[1].source == "wifi8");

    std::vector<std::vector<FeedEvent>> sixg(1);
    sixg[0] = {make_event(1, "6g", {"x"})};
    sixg.push_back({make_event(1, "ioe", {"y"})});
    merged = merge_feeds(sixg);
    CHECK(merged[0].source == "6g");  // "6g" sorts before "ioe"
}

TEST_CASE("merge_feeds: non-increasing timestamps rejected") {
    std::vector<std::vector<FeedEvent>> feeds(1);
    feeds[0] = {make_event(5, "wifi8", {"a"}), make_event(4, "wifi8", {"b"})};
    try {
        (void)merge_feeds(feeds);
        FAIL("expected UnorderedFeed");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnorderedFeed);
    }
}

TEST_CASE("merge_feeds: duplicate (t, source) across feeds rejected") {
    std::vector<std::vector<FeedEvent>> feeds(2);
    feeds[0] = {make_event(1, "ioe", {"a"})};
    feeds[1] = {make_event(1, "ioe", {"b"})};
    CHECK_THROWS_AS((void)merge_feeds(feeds), Error);
}

TEST_CASE("property: merge totality over random feeds") {
    Rng rng(17);
    const std::vector<std::string> sources = {"wifi8", "ioe", "6g"};
    for (int iter = 0; iter < 20; ++iter) {
        std::vector<std::vector<FeedEvent>> feeds(sources.size());
        std::size_t total = 0;
        for (std::size_t s = 0; s < sources.size(); ++s) {
            std::int64_t t = 0;
            const int n = static_cast<int>(rng.uniform_int(8));
            for (int i = 0; i < n; ++i) {
                t += 1 + static_cast<std::int64_t>(rng.uniform_int(4));
                feeds[s].push_back(make_event(t, sources[s], {"v"}));
                ++total;
            }
        }
        auto merged = merge_feeds(feeds);
        CHECK(merged.size() == total);
        for (std::size_t i = 1; i < merged.size(); ++i) {
            const bool ordered = merged[i - 1].t < merged[i].t ||
                                 (merged[i - 1].t == merged[i].t &&
                                  merged[i - 1].source < merged[i].source);
            CHECK(ordered);
        }
    }
}

TEST_CASE("share_pattern: idempotent propagation") {
    ThreatPattern p1;
    p1.id = "p1";
    p1.signature.push_back({"size", false, "", 1.0, 2.0});
    std::vector<PatternDB> nodes(3);
    share_pattern(p1, nodes);
    for (const auto& db : nodes) CHECK(db.size() == 1);
    share_pattern(p1, nodes);
    for (const auto& db : nodes) CHECK(db.size() == 1);

    ThreatPattern p2 = p1;
    p2.id = "p2";
    share_pattern(p2, nodes);
    for (const auto& db : nodes) CHECK(db.size() == 2);
}

TEST_CASE("pattern matching: intervals and category sets") {
    PatternDB db;
    ThreatPattern p;
    p.id = "x";
    p.signature.push_back({"proto", true, "tcp", 0.0, 0.0});
    p.signature.push_back({"size", false, "", 4.75, 5.25});
    db.insert(p);

    const std::vector<std::string> names = {"proto", "size"};
    CHECK(db.match(names, {"tcp", "5"}) != nullptr);
    CHECK(db.match(names, {"tcp", "5.2"}) != nullptr);
    CHECK(db.match(names, {"udp", "5"}) == nullptr);
    CHECK(db.match(names, {"tcp", "6"}) == nullptr);
    CHECK(db.match(names, {"tcp", "garbled"}) == nullptr);
}

TEST_CASE("evaluate_event: precedence order") {
    DetectorBundle bundle = toy_bundle();
    PatternDB db;

    // clean event passes
    auto clean = evaluate_event(make_event(1, "ioe", {"tcp", "2"}), bundle, db, 0.4);
    CHECK(clean.disposition.outcome == Disposition::Outcome::Pass);
    CHECK(clean.disposition.reason == Disposition::Reason::Clean);
    CHECK(!clean.minted);

    // known attack blocks via the model
    auto attack = evaluate_event(make_event(2, "ioe", {"tcp", "9"}), bundle, db, 0.4);
    CHECK(attack.disposition.outcome == Disposition::Outcome::Block);
    CHECK(attack.disposition.reason == Disposition::Reason::MlAnomaly);
    CHECK(attack.disposition.score == doctest::Approx(0.85));

    // tighter tau turns the same event into a novelty alert with a pattern
    auto novel = evaluate_event(make_event(3, "ioe", {"tcp", "9"}), bundle, db, 0.1);
    CHECK(novel.disposition.outcome == Disposition::Outcome::Alert);
    CHECK(novel.disposition.reason == Disposition::Reason::Novelty);
    REQUIRE(novel.minted);
    REQUIRE(novel.pattern.signature.size() == 2);
    CHECK(novel.pattern.signature[0].categorical);
    CHECK(novel.pattern.signature[0].category == "tcp");
    CHECK(novel.pattern.signature[1].lo == doctest::Approx(9.0 * 0.95));
    CHECK(novel.pattern.signature[1].hi == doctest::Approx(9.0 * 1.05));

    // once stored, the pattern takes precedence over everything
    db.insert(novel.pattern);
    auto repeat = evaluate_event(make_event(4, "ioe", {"tcp", "9"}), bundle, db, 0.4);
    CHECK(repeat.disposition.outcome == Disposition::Outcome::Block);
    CHECK(repeat.disposition.reason == Disposition::Reason::PatternMatch);
    CHECK(repeat.disposition.pattern_id == novel.pattern.id);

    // garbled numeric cell fails closed
    auto garbled = evaluate_event(make_event(5, "ioe", {"tcp", "???"}), bundle, db, 0.4);
    CHECK(garbled.disposition.outcome == Disposition::Outcome::Alert);
    CHECK(garbled.disposition.reason == Disposition::Reason::MlAnomaly);
    CHECK(garbled.disposition.score == 1.0);
}

TEST_CASE("run_simulation: determinism, conservation, propagation") {
    auto dir = test::tmp_dir("idps_sim");
    DetectorBundle bundle = toy_bundle();

    std::vector<std::vector<FeedEvent>> feeds(2);
    feeds[0] = {make_event(1, "wifi8", {"tcp", "9"}),   // novel on node 0 at tau 0.1
                make_event(2, "wifi8", {"tcp", "2"})};
    feeds[1] = {make_event(1, "ioe", {"tcp", "9"}),     // identical later event, node 1
                make_event(2, "ioe", {"udp", "1"})};

    const auto log1 = (dir / "a.jsonl").string();
    auto s1 = run_simulation(feeds, bundle, 2, 0.1, log1, "fp");
    CHECK(s1.events == 4);
    std::size_t outcome_total = 0;
    for (const auto& [k, v] : s1.by_outcome) outcome_total += v;
    CHECK(outcome_total == 4);  // exactly one disposition per event

    const auto log2 = (dir / "b.jsonl").string();
    auto s2 = run_simulation(feeds, bundle, 2, 0.1, log2, "fp");
    CHECK(test::read_file(log1) == test::read_file(log2));
    CHECK(s2.patterns_minted == s1.patterns_minted);

    // merged order: (1,ioe) node0 -> novelty alert + share; (1,wifi8) node1
    // -> identical values now block via pattern_match
    const std::string text = test::read_file(log1);
    const auto first_nl = text.find('\n');
    const std::string line1 = text.substr(0, first_nl);
    CHECK(line1.find("\"event_id\":\"ioe-1\"") != std::string::npos);
    CHECK(line1.find("\"reason\":\"novelty\"") != std::string::npos);
    const std::string line2 = text.substr(first_nl + 1, text.find('\n', first_nl + 1) - first_nl - 1);
    CHECK(line2.find("\"event_id\":\"wifi8-1\"") != std::string::npos);
    CHECK(line2.find("\"reason\":\"pattern_match\"") != std::string::npos);
    CHECK(s1.by_reason.at("pattern_match") >= 1);
}

TEST_CASE("run_simulation: all-normal feed stays quiet") {
    auto dir = test::tmp_dir("idps_quiet");
    DetectorBundle bundle = toy_bundle();
    std::vector<std::vector<FeedEvent>> feeds(1);
    for (int i = 1; i <= 10; ++i)
        feeds[0].push_back(make_event(i, "6g", {"tcp", std::to_string(1 + (i % 3))}));
    auto summary =
        run_simulation(feeds, bundle, 3, 0.4, (dir / "quiet.jsonl").string(), "fp");
    CHECK(summary.events == 10);
    CHECK(summary.by_outcome["pass"] == 10);
    CHECK(summary.by_outcome.count("alert") == 0);
    CHECK(summary.by_outcome.count("block") == 0);
    CHECK(summary.patterns_minted == 0);
}

TEST_CASE("feed csv round trip and validation") {
    auto dir = test::tmp_dir("idps_feed");
    const std::vector<std::string> cols = {"proto", "size"};
    std::vector<FeedEvent> events = {make_event(1, "wifi8", {"tcp", "5"}),
                                     make_event(2, "wifi8", {"udp", "1"})};
    const auto path = (dir / "feed.csv").string();
    write_feed_csv(path, events, cols);
    auto back = read_feed_csv(path, cols);
    REQUIRE(back.size() == 2);
    CHECK(back[0].t == 1);
    CHECK(back[0].source == "wifi8");
    CHECK(back[0].values == std::vector<std::string>{"tcp", "5"});
    CHECK(back[0].id == "wifi8-1");

    test::write_file(dir / "bad_header.csv", "time,source,proto,size\n1,wifi8,tcp,5\n");
    CHECK_THROWS_AS((void)read_feed_csv((dir / "bad_header.csv").string(), cols), Error);

    test::write_file(dir / "bad_source.csv", "t,source,proto,size\n1,lorawan,tcp,5\n");
    CHECK_THROWS_AS((void)read_feed_csv((dir / "bad_source.csv").string(), cols), Error);
}

TEST_CASE("feeds_from_table: round robin with per-source clocks") {
    RawTable t;
    t.schema.columns = {{"proto", ColumnKind::Categorical},
                        {"size", ColumnKind::Numeric},
                        {"cat", ColumnKind::ClassLabel}};
    for (int i = 0; i < 7; ++i)
        t.rows.push_back({i % 2 ? "tcp" : "udp", std::to_string(i), "Normal"});
    t.finalize();

    auto feeds = feeds_from_table(t, 7, {"wifi8", "ioe", "6g"});
    REQUIRE(feeds.size() == 3);
    CHECK(feeds[0].size() == 3);
    CHECK(feeds[1].size() == 2);
    CHECK(feeds[2].size() == 2);
    CHECK(feeds[0][0].values == std::vector<std::string>{"udp", "0"});
    for (const auto& feed : feeds) {
        for (std::size_t i = 1; i < feed.size(); ++i) CHECK(feed[i].t > feed[i - 1].t);
    }
    auto merged = merge_feeds(feeds);
    CHECK(merged.size() == 7);
}
