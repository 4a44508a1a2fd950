#include "xidps/zeroday.hpp"

#include <sstream>

#include "xidps/errors.hpp"

namespace xidps {

ZeroDayReport run_zeroday(const RawTable& table, const ZeroDayConfig& cfg,
                          const std::string& fingerprint) {
    ZeroDayReport report;
    report.known = cfg.known;
    report.unseen = cfg.unseen;
    report.fingerprint = fingerprint;

    const OpenSetSplit split =
        build_openset_split(table, cfg.known, cfg.unseen, cfg.test_fraction, cfg.seed);

    // hold out a slice of the training side for tau calibration
    auto [fit_raw, val_raw] = stratified_split(split.train, cfg.validation_fraction, cfg.seed + 1);

    const EncoderSpec encoder = fit_encoder(fit_raw);
    const EncodedMatrix fit = apply_encoder(fit_raw, encoder);
    const EncodedMatrix val = apply_encoder(val_raw, encoder);
    const EncodedMatrix test = apply_encoder(split.test, encoder);
    report.train_rows = fit.n_rows();
    report.test_rows = test.n_rows();

    std::vector<int> y_binary(fit.binary.begin(), fit.binary.end());
    const std::vector<std::string> binary_classes = {"Normal", "Attack"};

    std::vector<std::uint8_t> val_is_normal(val.n_rows());
    for (std::size_t r = 0; r < val.n_rows(); ++r)
        val_is_normal[r] = is_normal_class(val.label_name(r)) ? 1 : 0;

    const std::vector<std::string>& models = cfg.models.empty() ? model_names() : cfg.models;
    for (const auto& name : models) {
        ZeroDayModelResult result;
        result.model = name;
        auto multiclass =
            train_model(name, fit.values, fit.labels, fit.class_names, cfg.hp, cfg.seed);
        auto binary =
            train_model(name, fit.values, y_binary, binary_classes, cfg.hp, cfg.seed);
        result.tau = cfg.tau >= 0.0
                         ? cfg.tau
                         : calibrate_tau(*multiclass, *binary, val.values, val_is_normal,
                                         cfg.max_false_alarm);
        result.rates = evaluate_openset(*multiclass, *binary, test, cfg.unseen, result.tau);
        report.results.push_back(std::move(result));
    }
    return report;
}

std::string fig6_detection_csv(const ZeroDayReport& report) {
    std::ostringstream out;
    out << "# config_fingerprint=" << report.fingerprint << "\n";
    out << "model,tau,unseen_flag_rate,normal_false_alarm_rate,known_accuracy\n";
    out.precision(6);
    out << std::fixed;
    for (const auto& r : report.results)
        out << r.model << "," << r.tau << "," << r.rates.flag_rate << ","
            << r.rates.false_alarm_rate << "," << r.rates.known_accuracy << "\n";
    return out.str();
}

nlohmann::json zeroday_report_to_json(const ZeroDayReport& report) {
    nlohmann::json results = nlohmann::json::array();
    for (const auto& r : report.results) {
        results.push_back({{"model", r.model},
                           {"tau", r.tau},
                           {"unseen_flag_rate", r.rates.flag_rate},
                           {"normal_false_alarm_rate", r.rates.false_alarm_rate},
                           {"known_accuracy", r.rates.known_accuracy},
                           {"unseen_rows", r.rates.unseen_rows},
                           {"normal_rows", r.rates.normal_rows},
                           {"known_rows", r.rates.known_rows}});
    }
    return {{"format", "xidps-zeroday-report"},
            {"version", 1},
            {"config_fingerprint", report.fingerprint},
            {"known", report.known},
            {"unseen", report.unseen},
            {"train_rows", report.train_rows},
            {"test_rows", report.test_rows},
            {"results", std::move(results)}};
}

}  // namespace xidps
