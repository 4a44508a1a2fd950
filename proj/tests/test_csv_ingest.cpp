#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "xidps/csv.hpp"
#include "xidps/errors.hpp"
#include "xidps/ingest.hpp"
#include "xidps/rng.hpp"
#include "test_util.hpp"

using namespace xidps;

namespace {

// minimal well-formed UNSW rows; numerics default to zero-ish values
std::string unsw_header() {
    return "id,dur,proto,service,state,spkts,dpkts,sbytes,dbytes,rate,sttl,dttl,sload,dload,"
           "sloss,dloss,sinpkt,dinpkt,sjit,djit,swin,stcpb,dtcpb,dwin,tcprtt,synack,ackdat,"
           "smean,dmean,trans_depth,response_body_len,ct_srv_src,ct_state_ttl,ct_dst_ltm,"
           "ct_src_dport_ltm,ct_dst_sport_ltm,ct_dst_src_ltm,is_ftp_login,ct_ftp_cmd,"
           "ct_flw_http_mthd,ct_src_ltm,ct_srv_dst,is_sm_ips_ports,attack_cat,label";
}

std::string unsw_row(int id, const std::string& proto, const std::string& service,
                     const std::string& state, double dur, const std::string& attack_cat,
                     int label) {
    std::string row = std::to_string(id) + "," + std::to_string(dur) + "," + proto + "," +
                      service + "," + state;
    for (int i = 0; i < 38; ++i) row += "," + std::to_string(i % 7);
    row += "," + attack_cat + "," + std::to_string(label);
    return row;
}

RawTable tiny_table(const std::vector<std::pair<std::string, std::string>>& proto_class) {
    RawTable t;
    t.schema.columns = {{"proto", ColumnKind::Categorical},
                        {"size", ColumnKind::Numeric},
                        {"cat", ColumnKind::ClassLabel}};
    int i = 0;
    for (const auto& [proto, cls] : proto_class) {
        t.rows.push_back({proto, std::to_string(5 + i), cls});
        ++i;
    }
    t.finalize();
    return t;
}

}  // namespace

TEST_CASE("csv: rfc4180 basics") {
    auto rows = csv::parse("a,b,c\r\n1,\"x,y\",\"he said \"\"hi\"\"\"\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"a", "b", "c"});
    CHECK(rows[1][1] == "x,y");
    CHECK(rows[1][2] == "he said \"hi\"");
}

TEST_CASE("csv: unquoted cells trimmed, quoted kept verbatim") {
    auto rows = csv::parse(" a , \" b \" ,c\n");
    CHECK(rows[0][0] == "a");
    CHECK(rows[0][1] == " b ");
    CHECK(rows[0][2] == "c");
}

TEST_CASE("csv: newline inside quotes and final row without newline") {
    auto rows = csv::parse("\"line1\nline2\",x\nlast,row");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][0] == "line1\nline2");
    CHECK(rows[1][0] == "last");
}

TEST_CASE("csv: escape round trip") {
    std::vector<std::string> cells = {"plain", "with,comma", "with\"quote", "with\nnewline"};
    auto parsed = csv::parse(csv::join_row(cells) + "\n");
    CHECK(parsed[0] == cells);
}

TEST_CASE("load_unsw: well-formed sample") {
    auto dir = test::tmp_dir("ingest_unsw");
    std::string text = unsw_header() + "\n" + unsw_row(1, "tcp", "http", "FIN", 0.5, "Normal", 0) +
                       "\n" + unsw_row(2, "udp", "dns", "CON", 0.1, "DoS", 1) + "\n" +
                       unsw_row(3, "tcp", "-", "INT", 0.2, "Backdoor", 1) + "\n";
    auto table = load_unsw(test::write_file(dir / "ok.csv", text));
    CHECK(table.n_rows() == 3);
    CHECK(table.schema.columns[table.class_idx_].name == "attack_cat");
    CHECK(table.schema.feature_indices().size() == 42);
    CHECK(table.class_of(0) == "Normal");
}

TEST_CASE("load_unsw: class spellings mapped to canonical names") {
    auto dir = test::tmp_dir("ingest_canon");
    std::string text = unsw_header() + "\n" + unsw_row(1, "tcp", "http", "FIN", 0.5, "Dos", 1) +
                       "\n" + unsw_row(2, "tcp", "http", "FIN", 0.5, "Blackdoor", 1) + "\n";
    std::vector<std::pair<std::string, std::string>> renames;
    auto table = load_unsw(test::write_file(dir / "canon.csv", text), &renames);
    CHECK(table.class_of(0) == "DoS");
    CHECK(table.class_of(1) == "Backdoor");
    REQUIRE(renames.size() == 2);
    CHECK(renames[0] == std::pair<std::string, std::string>{"Dos", "DoS"});
}

TEST_CASE("load_unsw: missing attack_cat column") {
    auto dir = test::tmp_dir("ingest_missing");
    std::string header = unsw_header();
    const auto pos = header.find(",attack_cat");
    header.erase(pos, std::string(",attack_cat").size());
    std::string row = unsw_row(1, "tcp", "http", "FIN", 0.5, "Normal", 0);
    const auto rpos = row.rfind(",Normal");
    row.erase(rpos, std::string(",Normal").size());
    try {
        load_unsw(test::write_file(dir / "bad.csv", header + "\n" + row + "\n"));
        FAIL("expected MissingColumn");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingColumn);
    }
}

TEST_CASE("load_unsw: unparseable numeric cell reports row index") {
    auto dir = test::tmp_dir("ingest_nan");
    std::string bad = unsw_row(2, "tcp", "http", "FIN", 0.5, "Normal", 0);
    bad.replace(bad.find("0.5"), 3, "abc");
    std::string text =
        unsw_header() + "\n" + unsw_row(1, "tcp", "http", "FIN", 0.5, "Normal", 0) + "\n" + bad +
        "\n";
    try {
        load_unsw(test::write_file(dir / "nan.csv", text));
        FAIL("expected UnparseableNumber");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnparseableNumber);
        REQUIRE(e.row().has_value());
        CHECK(*e.row() == 1);
    }
}

TEST_CASE("load_unsw: short row reports ArityMismatch") {
    auto dir = test::tmp_dir("ingest_arity");
    std::string text =
        unsw_header() + "\n" + unsw_row(1, "tcp", "http", "FIN", 0.5, "Normal", 0) + "\n1,2,3\n";
    try {
        load_unsw(test::write_file(dir / "short.csv", text));
        FAIL("expected ArityMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ArityMismatch);
        CHECK(*e.row() == 1);
    }
}

TEST_CASE("load_nslkdd: 43 fields accepted, 41 features retained") {
    auto dir = test::tmp_dir("ingest_kdd");
    std::string line = "0,tcp,http,SF";
    for (int i = 0; i < 37; ++i) line += "," + std::to_string(i % 5);
    auto table = load_nslkdd(
        test::write_file(dir / "kdd.csv", line + ",normal,21\n" + line + ",neptune,20\n"));
    CHECK(table.n_rows() == 2);
    CHECK(table.schema.feature_indices().size() == 41);
    CHECK(table.class_of(0) == "Normal");   // canonicalized
    CHECK(table.class_of(1) == "neptune");  // pass-through
}

TEST_CASE("load_nslkdd: 40 fields is an arity error") {
    auto dir = test::tmp_dir("ingest_kdd_bad");
    std::string line = "0,tcp,http,SF";
    for (int i = 0; i < 36; ++i) line += ",0";
    try {
        load_nslkdd(test::write_file(dir / "kdd.csv", line + "\n"));
        FAIL("expected ArityMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ArityMismatch);
    }
}

TEST_CASE("fit_encoder: vocabulary order and degenerate bounds") {
    auto table = tiny_table({{"tcp", "A"}, {"udp", "B"}, {"tcp", "A"}});
    table.rows[0][1] = "5";
    table.rows[1][1] = "5";
    table.rows[2][1] = "5";
    auto spec = fit_encoder(table);
    REQUIRE(spec.categoricals.size() == 1);
    CHECK(spec.categoricals[0].vocabulary == std::vector<std::string>{"tcp", "udp"});
    REQUIRE(spec.numerics.size() == 1);
    CHECK(spec.numerics[0].min == 5.0);
    CHECK(spec.numerics[0].max == 6.0);
}

TEST_CASE("fit_encoder: empty table") {
    RawTable t = tiny_table({{"tcp", "A"}});
    t.rows.clear();
    CHECK_THROWS_AS((void)fit_encoder(t), Error);
}

TEST_CASE("apply_encoder: one-hot, scaling, clamping, unseen") {
    auto train = tiny_table({{"tcp", "A"}, {"udp", "B"}, {"icmp", "A"}});
    train.rows[0][1] = "2";
    train.rows[1][1] = "12";
    train.rows[2][1] = "7";
    auto spec = fit_encoder(train);
    auto em = apply_encoder(train, spec);
    CHECK(em.feature_names ==
          std::vector<std::string>{"proto=tcp", "proto=udp", "proto=icmp", "size"});
    CHECK(em.values(0, 0) == 1.0);
    CHECK(em.values(0, 1) == 0.0);
    CHECK(em.values(2, 3) == doctest::Approx(0.5));

    auto probe = tiny_table({{"sctp", "A"}});
    probe.rows[0][1] = "99";  // clamps to 1
    auto pm = apply_encoder(probe, spec);
    CHECK(pm.values(0, 0) == 0.0);
    CHECK(pm.values(0, 1) == 0.0);
    CHECK(pm.values(0, 2) == 0.0);
    CHECK(pm.values(0, 3) == 1.0);
}

TEST_CASE("apply_encoder: schema mismatch") {
    auto train = tiny_table({{"tcp", "A"}, {"udp", "B"}});
    auto spec = fit_encoder(train);
    RawTable other;
    other.schema.columns = {{"x", ColumnKind::Numeric}, {"cat", ColumnKind::ClassLabel}};
    other.rows.push_back({"1", "A"});
    other.finalize();
    CHECK_THROWS_AS((void)apply_encoder(other, spec), Error);
}

TEST_CASE("encoder spec json round trip") {
    auto train = tiny_table({{"tcp", "A"}, {"udp", "B"}});
    auto spec = fit_encoder(train);
    auto back = EncoderSpec::from_json(spec.to_json());
    CHECK(back.categoricals[0].vocabulary == spec.categoricals[0].vocabulary);
    CHECK(back.numerics[0].min == spec.numerics[0].min);
    auto em1 = apply_encoder(train, spec);
    auto em2 = apply_encoder(train, back);
    CHECK(em1.values == em2.values);
}

TEST_CASE("stratified_split: example counts and determinism") {
    std::vector<std::pair<std::string, std::string>> rows;
    for (int i = 0; i < 5; ++i) rows.push_back({"tcp", "A"});
    for (int i = 0; i < 5; ++i) rows.push_back({"udp", "B"});
    auto table = tiny_table(rows);

    auto [train, test] = stratified_split(table, 0.2, 42);
    CHECK(train.n_rows() == 8);
    CHECK(test.n_rows() == 2);
    std::size_t a = 0, b = 0;
    for (std::size_t r = 0; r < test.n_rows(); ++r) (test.class_of(r) == "A" ? a : b)++;
    CHECK(a == 1);
    CHECK(b == 1);

    auto [train2, test2] = stratified_split(table, 0.2, 42);
    CHECK(train.rows == train2.rows);
    CHECK(test.rows == test2.rows);
}

TEST_CASE("stratified_split: class with one row") {
    auto table = tiny_table({{"tcp", "A"}, {"udp", "A"}, {"tcp", "B"}});
    CHECK_THROWS_AS((void)stratified_split(table, 0.5, 1), Error);
}

TEST_CASE("filter_classes: keep, identity, unknown warning") {
    auto table = tiny_table({{"tcp", "A"}, {"udp", "B"}, {"tcp", "C"}, {"udp", "A"}});
    auto kept = filter_classes(table, {"A", "C"});
    CHECK(kept.n_rows() == 3);
    CHECK(kept.class_of(0) == "A");
    CHECK(kept.class_of(1) == "C");

    auto identity = filter_classes(table, {"A", "B", "C"});
    CHECK(identity.rows == table.rows);

    std::vector<std::string> warnings;
    auto none = filter_classes(table, {"Worms"}, &warnings);
    CHECK(none.n_rows() == 0);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("Worms") != std::string::npos);

    CHECK_THROWS_AS((void)filter_classes(table, {}), Error);
}

TEST_CASE("property: encoding stays in [0,1], finite, one-hot exclusive") {
    Rng rng(11);
    const std::vector<std::string> protos = {"tcp", "udp", "icmp", "sctp", "arp"};
    const std::vector<std::string> classes = {"A", "B", "C"};
    for (int iter = 0; iter < 25; ++iter) {
        std::vector<std::pair<std::string, std::string>> rows;
        const int n = 6 + static_cast<int>(rng.uniform_int(40));
        for (int i = 0; i < n; ++i)
            rows.push_back({protos[rng.uniform_int(protos.size())],
                            classes[rng.uniform_int(classes.size())]});
        auto table = tiny_table(rows);
        for (auto& row : table.rows) row[1] = std::to_string(rng.normal() * 100.0);

        auto spec = fit_encoder(table);
        // probe rows include categories/values the encoder never saw
        auto probe = table;
        probe.rows[0][0] = "vrrp";
        probe.rows[0][1] = "1e9";
        auto em = apply_encoder(probe, spec);

        for (Eigen::Index r = 0; r < em.values.rows(); ++r) {
            double hot = 0.0;
            for (Eigen::Index c = 0; c < em.values.cols(); ++c) {
                const double v = em.values(r, c);
                CHECK(std::isfinite(v));
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
                if (em.source_columns[static_cast<std::size_t>(c)] == "proto") hot += v;
            }
            CHECK(hot <= 1.0);  // at most one 1 per categorical block
        }
    }
}

TEST_CASE("property: stratification bound over random tables") {
    Rng rng(13);
    const std::vector<std::string> classes = {"A", "B", "C", "D"};
    for (int iter = 0; iter < 25; ++iter) {
        std::vector<std::pair<std::string, std::string>> rows;
        std::map<std::string, int> totals;
        for (std::size_t c = 0; c < classes.size(); ++c) {
            const int n = 2 + static_cast<int>(rng.uniform_int(30));
            totals[classes[c]] = n;
            for (int i = 0; i < n; ++i) rows.push_back({"tcp", classes[c]});
        }
        auto table = tiny_table(rows);
        const double fraction = 0.1 + 0.8 * rng.uniform();
        auto [train, test] = stratified_split(table, fraction, rng.next_u64());
        CHECK(train.n_rows() + test.n_rows() == table.n_rows());

        std::map<std::string, int> test_counts;
        for (std::size_t r = 0; r < test.n_rows(); ++r) ++test_counts[test.class_of(r)];
        for (const auto& [cls, total] : totals) {
            const double expect = fraction * total;
            CHECK(std::abs(test_counts[cls] - expect) <= 1.0);
        }
    }
}
