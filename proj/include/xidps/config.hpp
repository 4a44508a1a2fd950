#ifndef XIDPS_CONFIG_HPP
#define XIDPS_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "xidps/learners.hpp"

namespace xidps {

// One flat key-value config drives every subcommand. Precedence is
// flags > config file > defaults; unknown keys are rejected.
struct RunConfig {
    std::string dataset = "unsw";  // unsw | nslkdd
    std::string path;              // dataset CSV
    std::string out_dir = "out";

    std::vector<std::string> models;  // empty = full suite
    int k = 15;
    double tau = -1.0;  // negative = use stored calibration
    std::uint64_t seed = 42;
    std::size_t budget = 200;

    double test_fraction = 0.3;
    double validation_fraction = 0.2;
    double max_false_alarm = 0.10;
    int n_permutations = 30;
    int timing_repetitions = 5;
    std::size_t background_size = 100;
    std::string selection_model = "random_subspace";

    std::vector<std::string> known = {"Normal", "DoS", "Fuzzers"};
    std::string unseen = "Backdoor";

    std::vector<std::string> feeds;  // simulate inputs
    int nodes = 2;
    std::string sim_model = "adaboost_m1";

    Hyperparams hp;

    // stable hash over every hyperparameter and seed (output dir excluded)
    std::string fingerprint() const;
};

// "key = value" lines, '#' comments; throws ConfigError on unknown keys
RunConfig load_config_file(const std::string& path);

// applies one key=value override; shared by the CLI flag handling
void set_config_key(RunConfig& config, const std::string& key, const std::string& value);

}  // namespace xidps

#endif  // XIDPS_CONFIG_HPP
