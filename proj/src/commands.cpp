#include "xidps/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "xidps/ablation.hpp"
#include "xidps/errors.hpp"
#include "xidps/idps.hpp"
#include "xidps/ingest.hpp"
#include "xidps/shapley.hpp"
#include "xidps/zeroday.hpp"

namespace xidps {

namespace fs = std::filesystem;

namespace {

using nlohmann::json;

RawTable load_dataset(const RunConfig& config,
                      std::vector<std::pair<std::string, std::string>>* renames = nullptr) {
    if (config.path.empty())
        throw Error(ErrorCode::ConfigError, "no dataset path given (use --dataset/--path)");
    if (config.dataset == "nslkdd") return load_nslkdd(config.path, renames);
    return load_unsw(config.path, renames);
}

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json_artifact(const fs::path& path, const std::string& hint) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::MissingArtifact, path.string() + " not found; run `" + hint +
                                                    "` first");
    json j;
    in >> j;
    return j;
}

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::MissingArtifact: return kExitMissingArtifact;
        case ErrorCode::EmptyData:
        case ErrorCode::EmptyMatrix:
        case ErrorCode::DegenerateData:
        case ErrorCode::RoundsZero:
        case ErrorCode::SubsetTooLarge:
        case ErrorCode::ShapeMismatch: return kExitInternal;
        default: return kExitConfig;
    }
}

template <typename Fn>
int guarded(const char* command, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        std::cerr << "xidps " << command << ": " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "xidps " << command << ": " << e.what() << "\n";
        return kExitInternal;
    }
}

struct PipelineData {
    RawTable train_raw;
    RawTable test_raw;
    EncoderSpec encoder;
    EncodedMatrix train;
    EncodedMatrix test;
};

// the train/test partition every stage reproduces from (dataset, seed)
PipelineData prepare(const RunConfig& config) {
    PipelineData data;
    const RawTable table = load_dataset(config);
    auto [train_raw, test_raw] = stratified_split(table, config.test_fraction, config.seed);
    data.encoder = fit_encoder(train_raw);
    data.train = apply_encoder(train_raw, data.encoder);
    data.test = apply_encoder(test_raw, data.encoder);
    data.train_raw = std::move(train_raw);
    data.test_raw = std::move(test_raw);
    return data;
}

fs::path models_dir(const RunConfig& config) { return fs::path(config.out_dir) / "models"; }

std::vector<std::string> config_models(const RunConfig& config) {
    return config.models.empty() ? model_names() : config.models;
}

}  // namespace

int cmd_ingest(const RunConfig& config) {
    return guarded("ingest", [&] {
        std::vector<std::pair<std::string, std::string>> renames;
        const RawTable table = load_dataset(config, &renames);

        std::map<std::string, std::size_t> class_counts;
        for (std::size_t r = 0; r < table.n_rows(); ++r) ++class_counts[table.class_of(r)];

        json summary = {{"format", "xidps-ingest-summary"},
                        {"version", 1},
                        {"config_fingerprint", config.fingerprint()},
                        {"dataset", config.dataset},
                        {"path", config.path},
                        {"rows", table.n_rows()},
                        {"attributes", table.schema.feature_indices().size()},
                        {"classes", class_counts}};
        json mapping = json::array();
        for (const auto& [from, to] : renames) mapping.push_back({{"from", from}, {"to", to}});
        summary["class_name_mapping"] = std::move(mapping);

        write_json(fs::path(config.out_dir) / "summary.json", summary);

        std::cout << "rows: " << table.n_rows() << "\n";
        std::cout << "attributes: " << table.schema.feature_indices().size() << "\n";
        std::cout << "classes:";
        for (const auto& [name, count] : class_counts) std::cout << " " << name << "=" << count;
        std::cout << "\n";
        for (const auto& [from, to] : renames)
            std::cout << "class name \"" << from << "\" -> \"" << to << "\"\n";
        return kExitOk;
    });
}

int cmd_train(const RunConfig& config) {
    return guarded("train", [&] {
        const PipelineData data = prepare(config);
        write_text(fs::path(config.out_dir) / "encoder.json", data.encoder.to_json());

        std::vector<int> y_binary(data.train.binary.begin(), data.train.binary.end());
        const std::vector<std::string> binary_classes = {"Normal", "Attack"};

        json index = json::array();
        for (const auto& name : config_models(config)) {
            const auto start = std::chrono::steady_clock::now();
            auto multiclass = train_model(name, data.train.values, data.train.labels,
                                          data.train.class_names, config.hp, config.seed);
            auto binary = train_model(name, data.train.values, y_binary, binary_classes,
                                      config.hp, config.seed);
            const double ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - start)
                                  .count();

            json doc = {{"format", "xidps-model-pair"},
                        {"version", 1},
                        {"config_fingerprint", config.fingerprint()},
                        {"model", name},
                        {"seed", config.seed},
                        {"test_fraction", config.test_fraction},
                        {"feature_names", data.train.feature_names},
                        {"multiclass", model_to_json(*multiclass)},
                        {"binary", model_to_json(*binary)}};
            write_json(models_dir(config) / (name + ".json"), doc);
            index.push_back({{"model", name}, {"train_ms", ms}});
            std::cout << "trained " << name << " (" << ms << " ms, "
                      << data.train.n_rows() << " rows, " << data.train.n_features()
                      << " features)\n";
        }
        write_json(fs::path(config.out_dir) / "train_index.json",
                   json{{"format", "xidps-train-index"},
                        {"version", 1},
                        {"config_fingerprint", config.fingerprint()},
                        {"models", std::move(index)}});
        return kExitOk;
    });
}

namespace {

struct LoadedPair {
    std::unique_ptr<Model> multiclass;
    std::unique_ptr<Model> binary;
    std::vector<std::string> feature_names;
};

LoadedPair load_model_pair(const RunConfig& config, const std::string& name) {
    const json doc = read_json_artifact(models_dir(config) / (name + ".json"), "xidps train");
    LoadedPair pair;
    pair.multiclass = model_from_json(doc.at("multiclass"));
    pair.binary = model_from_json(doc.at("binary"));
    pair.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    return pair;
}

json ranking_to_json(const FeatureRanking& ranking, const RunConfig& config) {
    json entries = json::array();
    for (const auto& [name, value] : ranking.entries)
        entries.push_back({{"feature", name}, {"mean_abs_shap", value}});
    return {{"format", "xidps-ranking"},
            {"version", 1},
            {"config_fingerprint", config.fingerprint()},
            {"mode", ranking.mode == ExplainMode::Anomaly ? "anomaly" : "pattern"},
            {"entries", std::move(entries)}};
}

}  // namespace

int cmd_explain(const RunConfig& config) {
    return guarded("explain", [&] {
        const PipelineData data = prepare(config);
        LoadedPair pair = load_model_pair(config, config.selection_model);

        const BackgroundSet background =
            BackgroundSet::sample(data.train.values, config.background_size, config.seed);

        ExplainOptions opts;
        opts.budget = config.budget;
        opts.n_permutations = config.n_permutations;
        opts.seed = config.seed;

        std::vector<int> y_binary(data.train.binary.begin(), data.train.binary.end());
        const std::vector<std::string> binary_classes = {"Normal", "Attack"};

        json explanations = json::array();
        for (auto mode : {ExplainMode::Anomaly, ExplainMode::Pattern}) {
            opts.mode = mode;
            const bool anomaly = mode == ExplainMode::Anomaly;
            const Model& model = anomaly ? *pair.binary : *pair.multiclass;
            const auto& y = anomaly ? y_binary : data.train.labels;
            const auto& classes = anomaly ? binary_classes : data.train.class_names;

            auto explained =
                explain_dataset(model, data.train.values, y, classes, background, opts);
            auto ranking = rank_features(explained, data.train.feature_names,
                                         data.train.source_columns, mode);
            const char* tag = anomaly ? "anomaly" : "pattern";
            write_text(fs::path(config.out_dir) / ("ranking_" + std::string(tag) + ".csv"),
                       ranking_to_csv(ranking, config.fingerprint()));
            write_json(fs::path(config.out_dir) / ("ranking_" + std::string(tag) + ".json"),
                       ranking_to_json(ranking, config));

            for (const auto& e : explained) {
                explanations.push_back(
                    {{"mode", tag},
                     {"target", e.target},
                     {"base_value", e.base_value},
                     {"f_x", e.f_x},
                     {"phi", std::vector<double>(e.phi.begin(), e.phi.end())}});
            }
            std::cout << "explained " << explained.size() << " instances (" << tag << ")\n";
        }
        write_json(fs::path(config.out_dir) / "explanations.json",
                   json{{"format", "xidps-explanations"},
                        {"version", 1},
                        {"config_fingerprint", config.fingerprint()},
                        {"feature_names", data.train.feature_names},
                        {"explanations", std::move(explanations)}});
        return kExitOk;
    });
}

int cmd_select(const RunConfig& config) {
    return guarded("select", [&] {
        for (const char* tag : {"anomaly", "pattern"}) {
            const json doc = read_json_artifact(
                fs::path(config.out_dir) / ("ranking_" + std::string(tag) + ".json"),
                "xidps explain");
            FeatureRanking ranking;
            ranking.mode = std::string(tag) == "anomaly" ? ExplainMode::Anomaly
                                                         : ExplainMode::Pattern;
            for (const auto& e : doc.at("entries"))
                ranking.entries.emplace_back(e.at("feature"), e.at("mean_abs_shap"));

            const auto selected = select_top_k(ranking, config.k);

            std::ostringstream csv;
            csv << "# config_fingerprint=" << config.fingerprint() << "\n";
            csv << "rank,feature,mean_abs_shap\n";
            csv.precision(17);
            for (std::size_t i = 0; i < selected.size(); ++i)
                csv << (i + 1) << "," << selected[i] << ","
                    << ranking.entries[i].second << "\n";
            write_text(fs::path(config.out_dir) / ("selected_" + std::string(tag) + ".csv"),
                       csv.str());
            write_json(fs::path(config.out_dir) / ("selected_" + std::string(tag) + ".json"),
                       json{{"format", "xidps-selection"},
                            {"version", 1},
                            {"config_fingerprint", config.fingerprint()},
                            {"mode", tag},
                            {"k", config.k},
                            {"attributes", selected}});
            std::cout << "selected top-" << config.k << " (" << tag << "):";
            for (const auto& a : selected) std::cout << " " << a;
            std::cout << "\n";
        }
        return kExitOk;
    });
}

int cmd_ablate(const RunConfig& config) {
    return guarded("ablate", [&] {
        const RawTable table = load_dataset(config);
        AblationConfig cfg;
        cfg.models = config_models(config);
        cfg.k = config.k;
        cfg.test_fraction = config.test_fraction;
        cfg.seed = config.seed;
        cfg.budget = config.budget;
        cfg.n_permutations = config.n_permutations;
        cfg.timing_repetitions = config.timing_repetitions;
        cfg.background_size = config.background_size;
        cfg.selection_model = config.selection_model;
        cfg.hp = config.hp;

        const EvalReport report = run_ablation(table, cfg, config.fingerprint());
        write_json(fs::path(config.out_dir) / "eval_report.json", eval_report_to_json(report));
        write_text(fs::path(config.out_dir) / "fig7_accuracy.csv", fig7_accuracy_csv(report));
        write_text(fs::path(config.out_dir) / "fig8_ablation.csv", fig8_ablation_csv(report));

        for (const auto& row : report.rows) {
            std::cout << row.model << ": anomaly acc " << row.anomaly_acc_all << " -> "
                      << row.anomaly_acc_topk << ", train " << row.time_all.median_ms
                      << " ms -> " << row.time_topk.median_ms << " ms\n";
        }
        return kExitOk;
    });
}

int cmd_zeroday(const RunConfig& config) {
    return guarded("zeroday", [&] {
        const RawTable table = load_dataset(config);
        ZeroDayConfig cfg;
        cfg.known = config.known;
        cfg.unseen = config.unseen;
        cfg.models = config_models(config);
        cfg.test_fraction = config.test_fraction;
        cfg.validation_fraction = config.validation_fraction;
        cfg.max_false_alarm = config.max_false_alarm;
        cfg.tau = config.tau;
        cfg.seed = config.seed;
        cfg.hp = config.hp;

        const ZeroDayReport report = run_zeroday(table, cfg, config.fingerprint());
        write_json(fs::path(config.out_dir) / "zeroday.json", zeroday_report_to_json(report));
        write_text(fs::path(config.out_dir) / "fig6_detection.csv", fig6_detection_csv(report));

        for (const auto& r : report.results) {
            std::cout << r.model << ": tau " << r.tau << ", flag rate " << r.rates.flag_rate
                      << ", false alarm " << r.rates.false_alarm_rate << ", known acc "
                      << r.rates.known_accuracy << "\n";
        }
        return kExitOk;
    });
}

int cmd_simulate(const RunConfig& config) {
    return guarded("simulate", [&] {
        if (config.feeds.empty())
            throw Error(ErrorCode::ConfigError, "simulate needs feeds (use --feeds a.csv,b.csv)");

        const fs::path enc_path = fs::path(config.out_dir) / "encoder.json";
        std::ifstream enc_in(enc_path);
        if (!enc_in)
            throw Error(ErrorCode::MissingArtifact,
                        enc_path.string() + " not found; run `xidps train` first");
        std::ostringstream enc_buf;
        enc_buf << enc_in.rdbuf();

        DetectorBundle bundle;
        bundle.encoder = EncoderSpec::from_json(enc_buf.str());
        bundle.feature_columns = encoder_feature_columns(bundle.encoder);

        LoadedPair pair = load_model_pair(config, config.sim_model);
        bundle.multiclass = std::move(pair.multiclass);
        bundle.binary = std::move(pair.binary);

        const json selection = read_json_artifact(
            fs::path(config.out_dir) / "selected_pattern.json", "xidps select");
        bundle.selected_attributes =
            selection.at("attributes").get<std::vector<std::string>>();

        double tau = config.tau;
        if (tau < 0.0) {
            const fs::path zd_path = fs::path(config.out_dir) / "zeroday.json";
            std::ifstream zd_in(zd_path);
            if (!zd_in)
                throw Error(ErrorCode::MissingArtifact,
                            "tau not set and " + zd_path.string() +
                                " not found; run `xidps zeroday` or pass --tau");
            json zd;
            zd_in >> zd;
            bool found = false;
            for (const auto& r : zd.at("results")) {
                if (r.at("model") == config.sim_model) {
                    tau = r.at("tau");
                    found = true;
                    break;
                }
            }
            if (!found)
                throw Error(ErrorCode::MissingArtifact,
                            "no calibrated tau for " + config.sim_model + "; pass --tau");
        }

        std::vector<std::vector<FeedEvent>> feeds;
        for (const auto& path : config.feeds)
            feeds.push_back(read_feed_csv(path, bundle.feature_columns));

        const fs::path log_path = fs::path(config.out_dir) / "alerts.jsonl";
        fs::create_directories(config.out_dir);
        const SimSummary summary = run_simulation(feeds, bundle, config.nodes, tau,
                                                  log_path.string(), config.fingerprint());

        write_json(fs::path(config.out_dir) / "sim_summary.json",
                   json{{"format", "xidps-sim-summary"},
                        {"version", 1},
                        {"config_fingerprint", config.fingerprint()},
                        {"tau", tau},
                        {"nodes", summary.node_count},
                        {"events", summary.events},
                        {"patterns_minted", summary.patterns_minted},
                        {"by_outcome", summary.by_outcome},
                        {"by_reason", summary.by_reason}});

        std::cout << "events: " << summary.events << ", minted patterns: "
                  << summary.patterns_minted << "\n";
        for (const auto& [outcome, count] : summary.by_outcome)
            std::cout << "  " << outcome << ": " << count << "\n";
        return kExitOk;
    });
}

int cmd_report(const RunConfig& config) {
    return guarded("report", [&] {
        json report = {{"format", "xidps-report"},
                       {"version", 1},
                       {"config_fingerprint", config.fingerprint()}};
        bool any = false;
        const fs::path out(config.out_dir);
        const std::pair<const char*, const char*> parts[] = {
            {"ingest", "summary.json"},
            {"ablation", "eval_report.json"},
            {"zeroday", "zeroday.json"},
            {"simulation", "sim_summary.json"},
        };
        for (const auto& [key, file] : parts) {
            std::ifstream in(out / file);
            if (!in) continue;
            json j;
            in >> j;
            report[key] = std::move(j);
            any = true;
        }
        if (!any)
            throw Error(ErrorCode::MissingArtifact,
                        "no artifacts under " + config.out_dir + "; run the pipeline first");
        write_json(out / "report.json", report);

        if (report.contains("ablation")) {
            std::cout << "ablation (anomaly task, accuracy all -> top-"
                      << report["ablation"]["k"] << "):\n";
            for (const auto& row : report["ablation"]["models"]) {
                std::cout << "  " << row["model"].get<std::string>() << ": "
                          << row["anomaly_accuracy_all"].get<double>() << " -> "
                          << row["anomaly_accuracy_topk"].get<double>() << ", "
                          << row["train_time_all_ms"].get<double>() << " ms -> "
                          << row["train_time_topk_ms"].get<double>() << " ms\n";
            }
        }
        if (report.contains("zeroday")) {
            std::cout << "zero-day (unseen " << report["zeroday"]["unseen"].get<std::string>()
                      << "):\n";
            for (const auto& row : report["zeroday"]["results"]) {
                std::cout << "  " << row["model"].get<std::string>() << ": flag rate "
                          << row["unseen_flag_rate"].get<double>() << ", false alarm "
                          << row["normal_false_alarm_rate"].get<double>() << "\n";
            }
        }
        if (report.contains("simulation")) {
            std::cout << "simulation: " << report["simulation"]["events"].get<std::size_t>()
                      << " events, " << report["simulation"]["patterns_minted"].get<std::size_t>()
                      << " patterns minted\n";
        }
        std::cout << "wrote " << (out / "report.json").string() << "\n";
        return kExitOk;
    });
}

int run_command(const std::string& command, const RunConfig& config) {
    if (command == "ingest") return cmd_ingest(config);
    if (command == "train") return cmd_train(config);
    if (command == "explain") return cmd_explain(config);
    if (command == "select") return cmd_select(config);
    if (command == "ablate") return cmd_ablate(config);
    if (command == "zeroday") return cmd_zeroday(config);
    if (command == "simulate") return cmd_simulate(config);
    if (command == "report") return cmd_report(config);
    std::cerr << "xidps: unknown command " << command << "\n";
    return kExitConfig;
}

}  // namespace xidps
