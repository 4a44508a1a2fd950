#ifndef XIDPS_ZERODAY_HPP
#define XIDPS_ZERODAY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xidps/openset.hpp"

namespace xidps {

struct ZeroDayConfig {
    std::vector<std::string> known = {"Normal", "DoS", "Fuzzers"};
    std::string unseen = "Backdoor";
    std::vector<std::string> models;  // empty = full suite
    double test_fraction = 0.3;
    double validation_fraction = 0.2;  // slice of train used to calibrate tau
    double max_false_alarm = 0.10;
    double tau = -1.0;  // negative = calibrate per model
    std::uint64_t seed = 42;
    Hyperparams hp;
};

struct ZeroDayModelResult {
    std::string model;
    double tau = 0.0;
    OpenSetRates rates;
};

struct ZeroDayReport {
    std::vector<std::string> known;
    std::string unseen;
    std::vector<ZeroDayModelResult> results;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    std::string fingerprint;
};

// Open-set protocol: train multiclass + binary detectors on the known
// categories, calibrate tau on a validation slice, report flag and
// false-alarm rates over the held-out test side.
ZeroDayReport run_zeroday(const RawTable& table, const ZeroDayConfig& cfg,
                          const std::string& fingerprint);

std::string fig6_detection_csv(const ZeroDayReport& report);
nlohmann::json zeroday_report_to_json(const ZeroDayReport& report);

}  // namespace xidps

#endif  // XIDPS_ZERODAY_HPP
