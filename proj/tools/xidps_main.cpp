#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xidps/commands.hpp"
#include "xidps/errors.hpp"

using namespace xidps;

namespace {

struct FlagValues {
    std::string config_path;
    std::string dataset;
    std::string path;
    std::string model;
    std::string out;
    std::string feeds;
    std::string known;
    std::string unseen;
    std::string selection_model;
    std::string sim_model;
    int k = -1;
    double tau = -2.0;
    long long seed = -1;
    long long budget = -1;
    long long nodes = -1;
    double test_fraction = -1.0;
    long long permutations = -1;
};

void add_common_flags(CLI::App* cmd, FlagValues& flags) {
    cmd->add_option("--config", flags.config_path, "config file (key = value lines)");
    cmd->add_option("--dataset", flags.dataset, "dataset kind: unsw | nslkdd");
    cmd->add_option("--path", flags.path, "dataset CSV path");
    cmd->add_option("--model", flags.model, "comma-separated model list");
    cmd->add_option("--k", flags.k, "number of selected attributes");
    cmd->add_option("--tau", flags.tau, "novelty threshold in [0,1]");
    cmd->add_option("--seed", flags.seed, "RNG seed");
    cmd->add_option("--budget", flags.budget, "explanation budget");
    cmd->add_option("--out", flags.out, "output directory");
    cmd->add_option("--feeds", flags.feeds, "comma-separated feed CSVs (simulate)");
    cmd->add_option("--nodes", flags.nodes, "simulated node count");
    cmd->add_option("--known", flags.known, "known classes (zeroday)");
    cmd->add_option("--unseen", flags.unseen, "unseen class (zeroday)");
    cmd->add_option("--selection-model", flags.selection_model, "model driving attribution");
    cmd->add_option("--sim-model", flags.sim_model, "detector used by simulate");
    cmd->add_option("--test-fraction", flags.test_fraction, "held-out fraction");
    cmd->add_option("--permutations", flags.permutations, "permutations per sampled instance");
}

// flags > config file > defaults
RunConfig resolve(const FlagValues& flags) {
    RunConfig config;
    if (!flags.config_path.empty()) config = load_config_file(flags.config_path);
    if (!flags.dataset.empty()) set_config_key(config, "dataset", flags.dataset);
    if (!flags.path.empty()) set_config_key(config, "path", flags.path);
    if (!flags.model.empty()) set_config_key(config, "models", flags.model);
    if (flags.k >= 0) set_config_key(config, "k", std::to_string(flags.k));
    if (flags.tau >= -1.0) set_config_key(config, "tau", std::to_string(flags.tau));
    if (flags.seed >= 0) set_config_key(config, "seed", std::to_string(flags.seed));
    if (flags.budget >= 0) set_config_key(config, "budget", std::to_string(flags.budget));
    if (!flags.out.empty()) set_config_key(config, "out", flags.out);
    if (!flags.feeds.empty()) set_config_key(config, "feeds", flags.feeds);
    if (flags.nodes >= 1) set_config_key(config, "nodes", std::to_string(flags.nodes));
    if (!flags.known.empty()) set_config_key(config, "known", flags.known);
    if (!flags.unseen.empty()) set_config_key(config, "unseen", flags.unseen);
    if (!flags.selection_model.empty())
        set_config_key(config, "selection_model", flags.selection_model);
    if (!flags.sim_model.empty()) set_config_key(config, "sim_model", flags.sim_model);
    if (flags.test_fraction > 0.0)
        set_config_key(config, "test_fraction", std::to_string(flags.test_fraction));
    if (flags.permutations >= 1)
        set_config_key(config, "permutations", std::to_string(flags.permutations));
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interoperability and attribution-driven zero-day IDPS pipeline"};
    app.require_subcommand(1);

    const std::vector<std::string> commands = {"ingest",  "train",   "explain",  "select",
                                               "ablate",  "zeroday", "simulate", "report"};
    FlagValues flags;
    for (const auto& name : commands) {
        CLI::App* cmd = app.add_subcommand(name);
        add_common_flags(cmd, flags);
    }

    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const RunConfig config = resolve(flags);
        return run_command(command, config);
    } catch (const Error& e) {
        std::cerr << "xidps: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "xidps: " << e.what() << "\n";
        return kExitInternal;
    }
}
