// Writes the bundled desk-scale sample (UNSW-NB15 training-set layout) and,
// optionally, per-source event feeds for the simulator.
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "xidps/errors.hpp"
#include "xidps/ingest.hpp"
#include "xidps/sample_gen.hpp"

using namespace xidps;

int main(int argc, char** argv) {
    CLI::App app{"Generate the bundled flow sample and simulator feeds"};

    std::string out = "data/unsw_sample.csv";
    std::size_t rows = 28000;
    std::uint64_t seed = 7;
    std::string feeds_dir;
    std::size_t feed_events = 0;

    app.add_option("--out", out, "sample CSV path");
    app.add_option("--rows", rows, "row count");
    app.add_option("--seed", seed, "generator seed");
    app.add_option("--feeds-dir", feeds_dir, "also write wifi8/ioe/6g feed CSVs here");
    app.add_option("--feed-events", feed_events, "events across all feeds (default: all rows)");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto parent = std::filesystem::path(out).parent_path();
        if (!parent.empty()) std::filesystem::create_directories(parent);

        SampleOptions opts;
        opts.rows = rows;
        opts.seed = seed;
        write_unsw_sample(out, opts);
        std::cout << "wrote " << out << " (" << rows << " rows)\n";

        if (!feeds_dir.empty()) {
            std::filesystem::create_directories(feeds_dir);
            const RawTable table = load_unsw(out);
            const auto feature_columns = [&] {
                std::vector<std::string> names;
                for (auto i : table.schema.feature_indices())
                    names.push_back(table.schema.columns[i].name);
                return names;
            }();
            const std::vector<std::string> sources = {"wifi8", "ioe", "6g"};
            const std::size_t events = feed_events == 0 ? table.n_rows() : feed_events;
            const auto feeds = feeds_from_table(table, events, sources);
            for (std::size_t s = 0; s < sources.size(); ++s) {
                const std::string path = feeds_dir + "/feed_" + sources[s] + ".csv";
                write_feed_csv(path, feeds[s], feature_columns);
                std::cout << "wrote " << path << " (" << feeds[s].size() << " events)\n";
            }
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "make-sample: " << e.what() << "\n";
        return 1;
    }
}
