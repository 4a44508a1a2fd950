#include "xidps/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "xidps/errors.hpp"

namespace xidps {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

long long parse_int(const std::string& key, const std::string& value) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size())
        throw Error(ErrorCode::ConfigError, key + " expects an integer, got \"" + value + "\"");
    return v;
}

double parse_real(const std::string& key, const std::string& value) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size())
        throw Error(ErrorCode::ConfigError, key + " expects a number, got \"" + value + "\"");
    return v;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out.push_back(',');
        out += items[i];
    }
    return out;
}

}  // namespace

std::string RunConfig::fingerprint() const {
    std::ostringstream s;
    s.precision(17);
    s << "dataset=" << dataset << "\npath=" << path << "\nmodels=" << join(models)
      << "\nk=" << k << "\ntau=" << tau << "\nseed=" << seed << "\nbudget=" << budget
      << "\ntest_fraction=" << test_fraction << "\nvalidation_fraction=" << validation_fraction
      << "\nmax_false_alarm=" << max_false_alarm << "\npermutations=" << n_permutations
      << "\ntiming_repetitions=" << timing_repetitions << "\nbackground=" << background_size
      << "\nselection_model=" << selection_model << "\nknown=" << join(known)
      << "\nunseen=" << unseen << "\nfeeds=" << join(feeds) << "\nnodes=" << nodes
      << "\nsim_model=" << sim_model << "\nboost_rounds=" << hp.boost_rounds
      << "\nsubspace_members=" << hp.subspace_members
      << "\nsubspace_fraction=" << hp.subspace_fraction << "\ntree_depth=" << hp.tree_depth
      << "\ntable_max_features=" << hp.table_max_features << "\ntable_bins=" << hp.table_bins;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(s.str())));
    return buf;
}

void set_config_key(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "dataset") {
        if (value != "unsw" && value != "nslkdd")
            throw Error(ErrorCode::ConfigError, "dataset must be unsw or nslkdd");
        config.dataset = value;
    } else if (key == "path") {
        config.path = value;
    } else if (key == "out") {
        config.out_dir = value;
    } else if (key == "models" || key == "model") {
        config.models = split_list(value);
        for (const auto& m : config.models) {
            if (std::find(model_names().begin(), model_names().end(), m) == model_names().end())
                throw Error(ErrorCode::ConfigError, "unknown model " + m);
        }
    } else if (key == "k") {
        config.k = static_cast<int>(parse_int(key, value));
        if (config.k < 1) throw Error(ErrorCode::ConfigError, "k must be >= 1");
    } else if (key == "tau") {
        config.tau = parse_real(key, value);
        if (config.tau > 1.0) throw Error(ErrorCode::ConfigError, "tau must be <= 1");
    } else if (key == "seed") {
        config.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "budget") {
        const long long v = parse_int(key, value);
        if (v < 1) throw Error(ErrorCode::ConfigError, "budget must be >= 1");
        config.budget = static_cast<std::size_t>(v);
    } else if (key == "test_fraction") {
        config.test_fraction = parse_real(key, value);
        if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0))
            throw Error(ErrorCode::ConfigError, "test_fraction must lie in (0,1)");
    } else if (key == "validation_fraction") {
        config.validation_fraction = parse_real(key, value);
        if (!(config.validation_fraction > 0.0 && config.validation_fraction < 1.0))
            throw Error(ErrorCode::ConfigError, "validation_fraction must lie in (0,1)");
    } else if (key == "max_false_alarm") {
        config.max_false_alarm = parse_real(key, value);
    } else if (key == "permutations") {
        config.n_permutations = static_cast<int>(parse_int(key, value));
        if (config.n_permutations < 1)
            throw Error(ErrorCode::ConfigError, "permutations must be >= 1");
    } else if (key == "timing_repetitions") {
        config.timing_repetitions = static_cast<int>(parse_int(key, value));
        if (config.timing_repetitions < 1)
            throw Error(ErrorCode::ConfigError, "timing_repetitions must be >= 1");
    } else if (key == "background") {
        const long long v = parse_int(key, value);
        if (v < 1) throw Error(ErrorCode::ConfigError, "background must be >= 1");
        config.background_size = static_cast<std::size_t>(v);
    } else if (key == "selection_model") {
        config.selection_model = value;
    } else if (key == "known") {
        config.known = split_list(value);
        if (config.known.empty()) throw Error(ErrorCode::ConfigError, "known must be non-empty");
    } else if (key == "unseen") {
        config.unseen = value;
    } else if (key == "feeds") {
        config.feeds = split_list(value);
    } else if (key == "nodes") {
        config.nodes = static_cast<int>(parse_int(key, value));
        if (config.nodes < 1) throw Error(ErrorCode::ConfigError, "nodes must be >= 1");
    } else if (key == "sim_model") {
        config.sim_model = value;
    } else if (key == "boost_rounds") {
        config.hp.boost_rounds = static_cast<int>(parse_int(key, value));
    } else if (key == "subspace_members") {
        config.hp.subspace_members = static_cast<int>(parse_int(key, value));
    } else if (key == "subspace_fraction") {
        config.hp.subspace_fraction = parse_real(key, value);
    } else if (key == "tree_depth") {
        config.hp.tree_depth = static_cast<int>(parse_int(key, value));
    } else if (key == "table_max_features") {
        config.hp.table_max_features = static_cast<int>(parse_int(key, value));
    } else if (key == "table_bins") {
        config.hp.table_bins = static_cast<int>(parse_int(key, value));
    } else {
        throw Error(ErrorCode::ConfigError, "unknown config key " + key);
    }
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open config " + path);
    RunConfig config;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::ConfigError,
                        "line " + std::to_string(lineno) + " is not key = value");
        set_config_key(config, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return config;
}

}  // namespace xidps
