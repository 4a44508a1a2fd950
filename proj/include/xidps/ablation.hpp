#ifndef XIDPS_ABLATION_HPP
#define XIDPS_ABLATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xidps/ingest.hpp"
#include "xidps/learners.hpp"
#include "xidps/schema.hpp"

namespace xidps {

// median of repeated wall-clock measurements, milliseconds
struct TimingRecord {
    std::string operation;
    double median_ms = 0.0;
    int repetitions = 0;
};

double median(std::vector<double> values);

struct AblationRow {
    std::string model;
    // anomaly task, with vs without the attribution-selected attributes
    double anomaly_acc_all = 0.0;
    double anomaly_acc_topk = 0.0;
    TimingRecord time_all;
    TimingRecord time_topk;
    // attack-pattern (multi-class) task
    double pattern_acc_all = 0.0;
    double pattern_acc_topk = 0.0;
};

struct AblationConfig {
    std::vector<std::string> models;  // empty = full suite
    int k = 15;
    double test_fraction = 0.3;
    std::uint64_t seed = 42;
    std::size_t budget = 200;        // instances explained per mode
    int n_permutations = 30;
    int timing_repetitions = 5;
    std::size_t background_size = 100;
    std::string selection_model = "random_subspace";
    Hyperparams hp;
};

struct EvalReport {
    std::vector<AblationRow> rows;
    std::vector<std::string> anomaly_top_attributes;
    std::vector<std::string> pattern_top_attributes;
    double explain_anomaly_ms = 0.0;
    double explain_pattern_ms = 0.0;
    int k = 0;
    std::uint64_t seed = 0;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    std::string selection_model;
    std::string fingerprint;
};

// Trains every model on all attributes and again on the top-k selected by
// the dual-mode attribution of the selection model, recording accuracy and
// median training time for both arms.
EvalReport run_ablation(const RawTable& table, const AblationConfig& cfg,
                        const std::string& fingerprint);

std::string fig7_accuracy_csv(const EvalReport& report);
std::string fig8_ablation_csv(const EvalReport& report);
nlohmann::json eval_report_to_json(const EvalReport& report);

}  // namespace xidps

#endif  // XIDPS_ABLATION_HPP
