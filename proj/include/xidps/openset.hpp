#ifndef XIDPS_OPENSET_HPP
#define XIDPS_OPENSET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "xidps/ingest.hpp"
#include "xidps/learners.hpp"
#include "xidps/metrics.hpp"
#include "xidps/model.hpp"
#include "xidps/schema.hpp"
#include "xidps/types.hpp"

namespace xidps {

// Train on known categories only; every row of the unseen category lands in
// the test side together with the held-out known rows.
struct OpenSetSplit {
    std::vector<std::string> known;
    std::string unseen;
    RawTable train;
    RawTable test;
};

OpenSetSplit build_openset_split(const RawTable& table, const std::vector<std::string>& known,
                                 const std::string& unseen, double test_fraction,
                                 std::uint64_t seed);

// 1 - max class score: high when the instance resembles no known class
double novelty_score(const Model& model, const Eigen::Ref<const Vector>& x);

struct OpenSetDecision {
    bool novel = false;
    int label_index = 0;   // multiclass argmax, meaningful when !novel
    double novelty = 0.0;
    double binary_attack = 0.0;  // binary model's attack score, when consulted
};

// novel when the novelty score exceeds tau, or when the binary anomaly model
// flags attack while the multiclass argmax says Normal
OpenSetDecision classify_openset(const Model& multiclass, const Model& binary,
                                 const Eigen::Ref<const Vector>& x, double tau);

// Smallest tau (over observed novelty values) keeping the Normal false-alarm
// rate of the validation rows at or under the budget; 1.0 when nothing does.
double calibrate_tau(const Model& multiclass, const Model& binary, const Matrix& X,
                     const std::vector<std::uint8_t>& is_normal, double max_false_alarm = 0.10);

struct OpenSetRates {
    double flag_rate = 0.0;        // unseen rows judged novel or non-Normal
    double false_alarm_rate = 0.0; // Normal rows judged novel or non-Normal
    double known_accuracy = 0.0;   // known rows classified as their own class
    std::size_t unseen_rows = 0;
    std::size_t normal_rows = 0;
    std::size_t known_rows = 0;
};

// Rates over an encoded test set whose per-row label names are compared
// against the unseen class name.
OpenSetRates evaluate_openset(const Model& multiclass, const Model& binary,
                              const EncodedMatrix& test, const std::string& unseen, double tau);

}  // namespace xidps

#endif  // XIDPS_OPENSET_HPP
