#ifndef XIDPS_SHAPLEY_HPP
#define XIDPS_SHAPLEY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "xidps/model.hpp"
#include "xidps/types.hpp"

namespace xidps {

// Rows used to marginalize absent features (interventional expectation).
struct BackgroundSet {
    Matrix rows;

    std::size_t size() const { return static_cast<std::size_t>(rows.rows()); }

    // seed-deterministic sample without replacement; clamps to the table size
    static BackgroundSet sample(const Matrix& X, std::size_t size, std::uint64_t seed);
};

// Scalar model output an explanation is about: a fixed class score, or the
// binary anomaly view 1 - score(Normal).
struct ExplainTarget {
    enum class Kind { ClassScore, Anomaly };
    Kind kind = Kind::ClassScore;
    int index = 0;  // class index (ClassScore) or the Normal class index (Anomaly)

    static ExplainTarget class_score(int class_index) {
        return {Kind::ClassScore, class_index};
    }
    static ExplainTarget anomaly(int normal_index) { return {Kind::Anomaly, normal_index}; }

    std::string describe(const std::vector<std::string>& classes) const;
};

double eval_target(const Model& model, const ExplainTarget& target, const double* x,
                   double* scratch);

// Additive attribution of a single prediction: f_x = base_value + sum(phi)
// for exact computation. phi spans all model features; entries outside the
// explained subset stay zero.
struct ShapExplanation {
    double base_value = 0.0;
    Vector phi;
    double f_x = 0.0;
    std::string target;
};

// Exact Shapley values by full coalition enumeration over the given feature
// subset (at most 15 features). Features outside the subset are held at the
// instance's values.
ShapExplanation shap_exact(const Model& model, const ExplainTarget& target,
                           const Eigen::Ref<const Vector>& x, const BackgroundSet& background,
                           const std::vector<int>& features);

// Monte Carlo estimate: marginal contributions accumulated along sampled
// feature permutations, each step marginalized over the full background.
ShapExplanation shap_permutation(const Model& model, const ExplainTarget& target,
                                 const Eigen::Ref<const Vector>& x,
                                 const BackgroundSet& background, int n_permutations,
                                 std::uint64_t seed);

enum class ExplainMode { Pattern, Anomaly };

struct ExplainOptions {
    ExplainMode mode = ExplainMode::Pattern;
    std::size_t budget = 200;   // instances to explain
    int n_permutations = 30;    // used when the feature count exceeds the exact bound
    std::uint64_t seed = 0;
};

// Explains a seed-deterministic stratified sample of rows. Pattern mode
// explains the predicted-class score; anomaly mode explains 1 - score(Normal).
std::vector<ShapExplanation> explain_dataset(const Model& model, const Matrix& X,
                                             const std::vector<int>& labels,
                                             const std::vector<std::string>& class_names,
                                             const BackgroundSet& background,
                                             const ExplainOptions& opts);

struct FeatureRanking {
    std::vector<std::pair<std::string, double>> entries;  // (attribute, mean |phi|), descending
    ExplainMode mode = ExplainMode::Pattern;

    std::size_t size() const { return entries.size(); }
};

// Mean |phi| per feature across explanations; one-hot expanded columns are
// summed back into their source attribute.
FeatureRanking rank_features(const std::vector<ShapExplanation>& explanations,
                             const std::vector<std::string>& feature_names,
                             const std::vector<std::string>& source_columns = {},
                             ExplainMode mode = ExplainMode::Pattern);

std::vector<std::string> select_top_k(const FeatureRanking& ranking, int k);

std::string ranking_to_csv(const FeatureRanking& ranking, const std::string& fingerprint);

}  // namespace xidps

#endif  // XIDPS_SHAPLEY_HPP
