#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include <nlohmann/json.hpp>

#include "xidps/commands.hpp"
#include "xidps/config.hpp"
#include "xidps/errors.hpp"
#include "xidps/sample_gen.hpp"
#include "test_util.hpp"

using namespace xidps;

namespace {

std::size_t data_lines(const std::string& text) {
    std::size_t n = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        ++n;
    }
    return n ? n - 1 : 0;  // drop the header
}

}  // namespace

TEST_CASE("config: defaults, file, flag precedence") {
    auto dir = test::tmp_dir("cli_config");
    test::write_file(dir / "run.conf",
                     "# pipeline settings\n"
                     "dataset = unsw\n"
                     "k = 12\n"
                     "seed = 9\n"
                     "models = stump, adaboost_m1\n"
                     "tau = 0.4\n");
    RunConfig config = load_config_file((dir / "run.conf").string());
    CHECK(config.k == 12);
    CHECK(config.seed == 9);
    CHECK(config.models == std::vector<std::string>{"stump", "adaboost_m1"});
    CHECK(config.tau == 0.4);
    CHECK(config.nodes == 2);  // untouched default

    set_config_key(config, "k", "15");  // flag override wins
    CHECK(config.k == 15);
}

TEST_CASE("config: unknown keys and bad values rejected") {
    RunConfig config;
    CHECK_THROWS_AS(set_config_key(config, "frobnicate", "1"), Error);
    CHECK_THROWS_AS(set_config_key(config, "k", "zero"), Error);
    CHECK_THROWS_AS(set_config_key(config, "models", "stump,mystery_net"), Error);
    CHECK_THROWS_AS(set_config_key(config, "test_fraction", "1.5"), Error);

    auto dir = test::tmp_dir("cli_badconf");
    test::write_file(dir / "bad.conf", "k: 12\n");
    CHECK_THROWS_AS((void)load_config_file((dir / "bad.conf").string()), Error);
}

TEST_CASE("config: fingerprint tracks hyperparameters") {
    RunConfig a, b;
    CHECK(a.fingerprint() == b.fingerprint());
    b.k = 14;
    CHECK(a.fingerprint() != b.fingerprint());
    b = a;
    b.out_dir = "elsewhere";  // output location does not change identity
    CHECK(a.fingerprint() == b.fingerprint());
    b.hp.boost_rounds = 51;
    CHECK(a.fingerprint() != b.fingerprint());
}

TEST_CASE("cmd_ingest: bad path exits 2") {
    RunConfig config;
    config.path = "/nonexistent/file.csv";
    config.out_dir = test::tmp_dir("cli_badpath").string();
    CHECK(cmd_ingest(config) == kExitConfig);
}

TEST_CASE("cmd_explain without trained models exits 3") {
    auto dir = test::tmp_dir("cli_noartifact");
    SampleOptions sopt;
    sopt.rows = 600;
    sopt.seed = 2;
    write_unsw_sample((dir / "sample.csv").string(), sopt);

    RunConfig config;
    config.path = (dir / "sample.csv").string();
    config.out_dir = (dir / "out").string();
    config.budget = 5;
    CHECK(cmd_explain(config) == kExitMissingArtifact);
}

TEST_CASE("full pipeline over the bundled sample layout") {
    auto dir = test::tmp_dir("cli_pipeline");
    SampleOptions sopt;
    sopt.rows = 900;
    sopt.seed = 4;
    write_unsw_sample((dir / "sample.csv").string(), sopt);

    RunConfig config;
    config.path = (dir / "sample.csv").string();
    config.out_dir = (dir / "out").string();
    config.models = {"stump", "adaboost_m1", "random_subspace"};
    config.selection_model = "random_subspace";
    config.sim_model = "adaboost_m1";
    config.k = 8;
    config.budget = 30;
    config.n_permutations = 4;
    config.timing_repetitions = 1;
    config.background_size = 25;
    config.hp.boost_rounds = 10;
    config.hp.subspace_members = 5;

    // feed files enter the config up front so every artifact shares one
    // fingerprint
    auto table = load_unsw((dir / "sample.csv").string());
    const auto features = [&] {
        std::vector<std::string> names;
        for (auto i : table.schema.feature_indices())
            names.push_back(table.schema.columns[i].name);
        return names;
    }();
    auto feeds = feeds_from_table(table, 60, {"wifi8", "ioe", "6g"});
    std::vector<std::string> feed_paths;
    for (std::size_t s = 0; s < feeds.size(); ++s) {
        const auto path = (dir / ("feed" + std::to_string(s) + ".csv")).string();
        write_feed_csv(path, feeds[s], features);
        feed_paths.push_back(path);
    }
    config.feeds = feed_paths;

    REQUIRE(cmd_ingest(config) == kExitOk);
    REQUIRE(cmd_train(config) == kExitOk);
    REQUIRE(cmd_explain(config) == kExitOk);
    REQUIRE(cmd_select(config) == kExitOk);
    REQUIRE(cmd_ablate(config) == kExitOk);
    REQUIRE(cmd_zeroday(config) == kExitOk);

    // selected CSV carries exactly k feature rows
    const std::string selected = test::read_file(dir / "out" / "selected_pattern.csv");
    CHECK(data_lines(selected) == 8);

    // fig CSVs exist with one row per model
    CHECK(data_lines(test::read_file(dir / "out" / "fig7_accuracy.csv")) == 3);
    CHECK(data_lines(test::read_file(dir / "out" / "fig8_ablation.csv")) == 3);
    CHECK(data_lines(test::read_file(dir / "out" / "fig6_detection.csv")) == 3);

    // simulate over the generated feeds; the log gets one line per event
    REQUIRE(cmd_simulate(config) == kExitOk);

    std::ifstream log(dir / "out" / "alerts.jsonl");
    std::size_t lines = 0;
    std::string line;
    while (std::getline(log, line))
        if (!line.empty()) ++lines;
    CHECK(lines == 60);

    // second run replays byte-identically
    const std::string first = test::read_file(dir / "out" / "alerts.jsonl");
    REQUIRE(cmd_simulate(config) == kExitOk);
    CHECK(test::read_file(dir / "out" / "alerts.jsonl") == first);

    REQUIRE(cmd_report(config) == kExitOk);
    nlohmann::json report = nlohmann::json::parse(test::read_file(dir / "out" / "report.json"));
    CHECK(report.contains("ablation"));
    CHECK(report.contains("zeroday"));
    CHECK(report.contains("simulation"));
    CHECK(report["simulation"]["events"] == 60);

    // select twice produces identical artifacts
    const std::string sel1 = test::read_file(dir / "out" / "selected_anomaly.csv");
    REQUIRE(cmd_select(config) == kExitOk);
    CHECK(test::read_file(dir / "out" / "selected_anomaly.csv") == sel1);

    // every artifact embeds the fingerprint
    const std::string fp = config.fingerprint();
    for (const char* name : {"summary.json", "eval_report.json", "zeroday.json",
                             "sim_summary.json", "fig6_detection.csv", "fig7_accuracy.csv",
                             "fig8_ablation.csv", "ranking_pattern.csv", "selected_pattern.csv",
                             "report.json"}) {
        const std::string text = test::read_file(dir / "out" / name);
        CHECK_MESSAGE(text.find(fp) != std::string::npos, name);
    }
}

TEST_CASE("simulate without feeds exits 2, without artifacts exits 3") {
    auto dir = test::tmp_dir("cli_sim_err");
    RunConfig config;
    config.out_dir = (dir / "out").string();
    CHECK(cmd_simulate(config) == kExitConfig);

    config.feeds = {(dir / "feed.csv").string()};
    CHECK(cmd_simulate(config) == kExitMissingArtifact);
}

TEST_CASE("report with no artifacts exits 3") {
    RunConfig config;
    config.out_dir = test::tmp_dir("cli_report_empty").string();
    CHECK(cmd_report(config) == kExitMissingArtifact);
}
