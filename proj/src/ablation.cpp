#include "xidps/ablation.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "xidps/errors.hpp"
#include "xidps/metrics.hpp"
#include "xidps/shapley.hpp"

namespace xidps {

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct Task {
    std::vector<int> y;
    std::vector<std::string> class_names;
};

Task anomaly_task(const EncodedMatrix& em) {
    Task t;
    t.class_names = {"Normal", "Attack"};
    t.y.reserve(em.n_rows());
    for (auto b : em.binary) t.y.push_back(b);
    return t;
}

Task pattern_task(const EncodedMatrix& em) {
    Task t;
    t.class_names = em.class_names;
    t.y = em.labels;
    return t;
}

// evaluated against the label names so train/test class orders may differ
double task_accuracy(const Model& model, const EncodedMatrix& test, bool binary_task) {
    std::size_t correct = 0;
    const auto n = test.n_rows();
    for (std::size_t r = 0; r < n; ++r) {
        const Vector row = test.values.row(static_cast<Eigen::Index>(r)).transpose();
        const std::string predicted = predict_label(model, row);
        if (binary_task) {
            const bool pred_attack = !is_normal_class(predicted);
            if (pred_attack == (test.binary[r] != 0)) ++correct;
        } else {
            if (predicted == test.label_name(r)) ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(n);
}

struct TimedModel {
    std::unique_ptr<Model> model;
    TimingRecord timing;
};

TimedModel train_timed(const std::string& name, const Matrix& X, const Task& task,
                       const Hyperparams& hp, std::uint64_t seed, int repetitions,
                       const std::string& operation) {
    TimedModel out;
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(repetitions));
    for (int rep = 0; rep < repetitions; ++rep) {
        const auto start = Clock::now();
        auto model = train_model(name, X, task.y, task.class_names, hp, seed);
        times.push_back(ms_since(start));
        if (rep == 0) out.model = std::move(model);
    }
    out.timing.operation = operation;
    out.timing.median_ms = median(times);
    out.timing.repetitions = repetitions;
    return out;
}

}  // namespace

EvalReport run_ablation(const RawTable& table, const AblationConfig& cfg,
                        const std::string& fingerprint) {
    EvalReport report;
    report.k = cfg.k;
    report.seed = cfg.seed;
    report.selection_model = cfg.selection_model;
    report.fingerprint = fingerprint;

    const std::vector<std::string>& models = cfg.models.empty() ? model_names() : cfg.models;

    auto [train_raw, test_raw] = stratified_split(table, cfg.test_fraction, cfg.seed);
    const EncoderSpec encoder = fit_encoder(train_raw);
    const EncodedMatrix train = apply_encoder(train_raw, encoder);
    const EncodedMatrix test = apply_encoder(test_raw, encoder);
    report.train_rows = train.n_rows();
    report.test_rows = test.n_rows();

    const Task anomaly = anomaly_task(train);
    const Task pattern = pattern_task(train);
    const BackgroundSet background =
        BackgroundSet::sample(train.values, cfg.background_size, cfg.seed);

    // all-attribute selection models drive the two rankings
    auto selection_binary =
        train_model(cfg.selection_model, train.values, anomaly.y, anomaly.class_names, cfg.hp,
                    cfg.seed);
    auto selection_multi =
        train_model(cfg.selection_model, train.values, pattern.y, pattern.class_names, cfg.hp,
                    cfg.seed);

    ExplainOptions opts;
    opts.budget = cfg.budget;
    opts.n_permutations = cfg.n_permutations;
    opts.seed = cfg.seed;

    {
        opts.mode = ExplainMode::Anomaly;
        const auto start = Clock::now();
        auto explanations = explain_dataset(*selection_binary, train.values, anomaly.y,
                                            anomaly.class_names, background, opts);
        report.explain_anomaly_ms = ms_since(start);
        auto ranking = rank_features(explanations, train.feature_names, train.source_columns,
                                     ExplainMode::Anomaly);
        const int k = std::min<int>(cfg.k, static_cast<int>(ranking.size()));
        report.anomaly_top_attributes = select_top_k(ranking, k);
    }
    {
        opts.mode = ExplainMode::Pattern;
        const auto start = Clock::now();
        auto explanations = explain_dataset(*selection_multi, train.values, pattern.y,
                                            pattern.class_names, background, opts);
        report.explain_pattern_ms = ms_since(start);
        auto ranking = rank_features(explanations, train.feature_names, train.source_columns,
                                     ExplainMode::Pattern);
        const int k = std::min<int>(cfg.k, static_cast<int>(ranking.size()));
        report.pattern_top_attributes = select_top_k(ranking, k);
    }

    const auto anomaly_cols = train.columns_of(report.anomaly_top_attributes);
    const auto pattern_cols = train.columns_of(report.pattern_top_attributes);
    const EncodedMatrix train_anom = train.select_columns(anomaly_cols);
    const EncodedMatrix test_anom = test.select_columns(anomaly_cols);
    const EncodedMatrix train_pat = train.select_columns(pattern_cols);
    const EncodedMatrix test_pat = test.select_columns(pattern_cols);

    for (const auto& name : models) {
        AblationRow row;
        row.model = name;

        TimedModel all = train_timed(name, train.values, anomaly, cfg.hp, cfg.seed,
                                     cfg.timing_repetitions, name + "/train/all");
        row.anomaly_acc_all = task_accuracy(*all.model, test, true);
        row.time_all = all.timing;

        TimedModel topk = train_timed(name, train_anom.values, anomaly, cfg.hp, cfg.seed,
                                      cfg.timing_repetitions, name + "/train/topk");
        row.anomaly_acc_topk = task_accuracy(*topk.model, test_anom, true);
        row.time_topk = topk.timing;

        auto pat_all = train_model(name, train.values, pattern.y, pattern.class_names, cfg.hp,
                                   cfg.seed);
        row.pattern_acc_all = task_accuracy(*pat_all, test, false);
        auto pat_topk = train_model(name, train_pat.values, pattern.y, pattern.class_names,
                                    cfg.hp, cfg.seed);
        row.pattern_acc_topk = task_accuracy(*pat_topk, test_pat, false);

        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string fig7_accuracy_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "# config_fingerprint=" << report.fingerprint << "\n";
    out << "model,pattern_accuracy_top" << report.k << ",pattern_accuracy_all\n";
    out.precision(6);
    out << std::fixed;
    for (const auto& row : report.rows)
        out << row.model << "," << row.pattern_acc_topk << "," << row.pattern_acc_all << "\n";
    return out.str();
}

std::string fig8_ablation_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "# config_fingerprint=" << report.fingerprint << "\n";
    out << "model,accuracy_without_xai,accuracy_with_xai,time_without_xai_ms,time_with_xai_ms\n";
    out.precision(6);
    out << std::fixed;
    for (const auto& row : report.rows)
        out << row.model << "," << row.anomaly_acc_all << "," << row.anomaly_acc_topk << ","
            << row.time_all.median_ms << "," << row.time_topk.median_ms << "\n";
    return out.str();
}

nlohmann::json eval_report_to_json(const EvalReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        rows.push_back({{"model", row.model},
                        {"anomaly_accuracy_all", row.anomaly_acc_all},
                        {"anomaly_accuracy_topk", row.anomaly_acc_topk},
                        {"train_time_all_ms", row.time_all.median_ms},
                        {"train_time_topk_ms", row.time_topk.median_ms},
                        {"timing_repetitions", row.time_all.repetitions},
                        {"pattern_accuracy_all", row.pattern_acc_all},
                        {"pattern_accuracy_topk", row.pattern_acc_topk}});
    }
    return {{"format", "xidps-eval-report"},
            {"version", 1},
            {"config_fingerprint", report.fingerprint},
            {"k", report.k},
            {"seed", report.seed},
            {"train_rows", report.train_rows},
            {"test_rows", report.test_rows},
            {"selection_model", report.selection_model},
            {"anomaly_top_attributes", report.anomaly_top_attributes},
            {"pattern_top_attributes", report.pattern_top_attributes},
            {"explain_anomaly_ms", report.explain_anomaly_ms},
            {"explain_pattern_ms", report.explain_pattern_ms},
            {"models", std::move(rows)}};
}

}  // namespace xidps
