#include "xidps/openset.hpp"

#include <algorithm>
#include <unordered_set>

#include "xidps/errors.hpp"

namespace xidps {

OpenSetSplit build_openset_split(const RawTable& table, const std::vector<std::string>& known,
                                 const std::string& unseen, double test_fraction,
                                 std::uint64_t seed) {
    std::unordered_set<std::string> present;
    for (std::size_t r = 0; r < table.n_rows(); ++r) present.insert(table.class_of(r));
    if (!present.count(unseen))
        throw Error(ErrorCode::UnknownClass, "unseen class " + unseen + " not in table");
    for (const auto& k : known) {
        if (!present.count(k))
            throw Error(ErrorCode::UnknownClass, "known class " + k + " not in table");
        if (k == unseen)
            throw Error(ErrorCode::UnknownClass, "unseen class " + unseen + " listed as known");
    }

    RawTable known_rows = filter_classes(table, known);
    auto [train, known_test] = stratified_split(known_rows, test_fraction, seed);

    OpenSetSplit split;
    split.known = known;
    split.unseen = unseen;
    split.train = std::move(train);
    split.test = std::move(known_test);
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        if (table.class_of(r) == unseen) split.test.rows.push_back(table.rows[r]);
    }
    split.test.finalize();
    return split;
}

double novelty_score(const Model& model, const Eigen::Ref<const Vector>& x) {
    return 1.0 - predict_scores(model, x).maxCoeff();
}

OpenSetDecision classify_openset(const Model& multiclass, const Model& binary,
                                 const Eigen::Ref<const Vector>& x, double tau) {
    Vector scores = predict_scores(multiclass, x);
    int best = 0;
    for (int c = 1; c < scores.size(); ++c)
        if (scores[c] > scores[best]) best = c;

    OpenSetDecision decision;
    decision.label_index = best;
    decision.novelty = 1.0 - scores[best];
    if (decision.novelty > tau) {
        decision.novel = true;
        return decision;
    }
    // disagreement rule: the binary detector flags an attack the multiclass
    // model would wave through as Normal
    if (is_normal_class(multiclass.classes()[static_cast<std::size_t>(best)])) {
        const Vector bscores = predict_scores(binary, x);
        int bbest = 0;
        for (int c = 1; c < bscores.size(); ++c)
            if (bscores[c] > bscores[bbest]) bbest = c;
        for (int c = 0; c < bscores.size(); ++c)
            if (!is_normal_class(binary.classes()[static_cast<std::size_t>(c)]))
                decision.binary_attack += bscores[c];
        if (!is_normal_class(binary.classes()[static_cast<std::size_t>(bbest)]))
            decision.novel = true;
    }
    return decision;
}

double calibrate_tau(const Model& multiclass, const Model& binary, const Matrix& X,
                     const std::vector<std::uint8_t>& is_normal, double max_false_alarm) {
    // a Normal row counts as a false alarm the same way evaluate_openset
    // sees it: non-Normal argmax or binary disagreement flag it at any tau,
    // the novelty path flags it only above tau
    std::vector<double> novelty_clean;
    std::size_t normal_total = 0, always_flagged = 0;
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        if (!is_normal[static_cast<std::size_t>(r)]) continue;
        ++normal_total;
        const Vector row = X.row(r).transpose();
        Vector scores = predict_scores(multiclass, row);
        int best = 0;
        for (int c = 1; c < scores.size(); ++c)
            if (scores[c] > scores[best]) best = c;
        const bool says_normal =
            is_normal_class(multiclass.classes()[static_cast<std::size_t>(best)]);
        if (!says_normal || !is_normal_class(predict_label(binary, row)))
            ++always_flagged;
        else novelty_clean.push_back(1.0 - scores[best]);
    }
    if (normal_total == 0) return 1.0;

    std::sort(novelty_clean.begin(), novelty_clean.end());
    std::vector<double> candidates = {0.0};
    candidates.insert(candidates.end(), novelty_clean.begin(), novelty_clean.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    for (double tau : candidates) {
        const auto above = static_cast<std::size_t>(
            novelty_clean.end() -
            std::upper_bound(novelty_clean.begin(), novelty_clean.end(), tau));
        const double fa = static_cast<double>(always_flagged + above) /
                          static_cast<double>(normal_total);
        if (fa <= max_false_alarm) return tau;
    }
    return 1.0;
}

OpenSetRates evaluate_openset(const Model& multiclass, const Model& binary,
                              const EncodedMatrix& test, const std::string& unseen, double tau) {
    OpenSetRates rates;
    std::size_t unseen_flagged = 0, normal_flagged = 0, known_correct = 0;

    for (std::size_t r = 0; r < test.n_rows(); ++r) {
        const Vector row = test.values.row(static_cast<Eigen::Index>(r)).transpose();
        const OpenSetDecision d = classify_openset(multiclass, binary, row, tau);
        const std::string& truth = test.label_name(r);
        const std::string predicted =
            d.novel ? "" : multiclass.classes()[static_cast<std::size_t>(d.label_index)];
        const bool flagged = d.novel || !is_normal_class(predicted);

        if (truth == unseen) {
            ++rates.unseen_rows;
            if (flagged) ++unseen_flagged;
        } else {
            ++rates.known_rows;
            if (!d.novel && predicted == truth) ++known_correct;
            if (is_normal_class(truth)) {
                ++rates.normal_rows;
                if (flagged) ++normal_flagged;
            }
        }
    }
    if (rates.unseen_rows)
        rates.flag_rate = static_cast<double>(unseen_flagged) /
                          static_cast<double>(rates.unseen_rows);
    if (rates.normal_rows)
        rates.false_alarm_rate = static_cast<double>(normal_flagged) /
                                 static_cast<double>(rates.normal_rows);
    if (rates.known_rows)
        rates.known_accuracy = static_cast<double>(known_correct) /
                               static_cast<double>(rates.known_rows);
    return rates;
}

}  // namespace xidps
