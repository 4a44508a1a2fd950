#include "xidps/model.hpp"

#include <algorithm>
#include <numeric>

#include "xidps/errors.hpp"
#include "xidps/learners.hpp"

namespace xidps {

Vector predict_scores(const Model& model, const Eigen::Ref<const Vector>& x) {
    if (static_cast<std::size_t>(x.size()) != model.n_features())
        throw Error(ErrorCode::ArityMismatch,
                    "row has " + std::to_string(x.size()) + " features, model expects " +
                        std::to_string(model.n_features()));
    Vector out(static_cast<Eigen::Index>(model.n_classes()));
    model.score_into(x.data(), out.data());
    return out;
}

int predict_index(const Model& model, const Eigen::Ref<const Vector>& x) {
    Vector s = predict_scores(model, x);
    int best = 0;
    for (int c = 1; c < s.size(); ++c)
        if (s[c] > s[best]) best = c;  // ties keep the earlier class
    return best;
}

std::string predict_label(const Model& model, const Eigen::Ref<const Vector>& x) {
    return model.classes()[static_cast<std::size_t>(predict_index(model, x))];
}

FeatureOrder FeatureOrder::build(const Matrix& X) {
    std::vector<int> all(static_cast<std::size_t>(X.cols()));
    std::iota(all.begin(), all.end(), 0);
    return build_subset(X, all);
}

FeatureOrder FeatureOrder::build_subset(const Matrix& X, const std::vector<int>& features) {
    FeatureOrder fo;
    fo.by_feature.resize(static_cast<std::size_t>(X.cols()));
    const int n = static_cast<int>(X.rows());
    for (int f : features) {
        auto& ord = fo.by_feature[static_cast<std::size_t>(f)];
        ord.resize(static_cast<std::size_t>(n));
        std::iota(ord.begin(), ord.end(), 0);
        const auto col = X.col(f);
        std::sort(ord.begin(), ord.end(), [&](int a, int b) {
            if (col[a] != col[b]) return col[a] < col[b];
            return a < b;
        });
    }
    return fo;
}

nlohmann::json model_to_json(const Model& model) {
    nlohmann::json j = model.to_json();
    j["format"] = "xidps-model";
    j["version"] = 1;
    return j;
}

std::unique_ptr<Model> model_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "xidps-model")
        throw Error(ErrorCode::SchemaMismatch, "not a model document");
    const std::string kind = j.at("kind");
    if (kind == "stump") return std::make_unique<Stump>(Stump::from_json(j));
    if (kind == "tree") return std::make_unique<Tree>(Tree::from_json(j));
    if (kind == "adaboost_m1") return std::make_unique<AdaBoost>(AdaBoost::from_json(j));
    if (kind == "logitboost_ovr") return std::make_unique<LogitBoost>(LogitBoost::from_json(j));
    if (kind == "decision_table")
        return std::make_unique<DecisionTable>(DecisionTable::from_json(j));
    if (kind == "random_subspace")
        return std::make_unique<RandomSubspace>(RandomSubspace::from_json(j));
    throw Error(ErrorCode::SchemaMismatch, "unknown model kind " + kind);
}

const std::vector<std::string>& model_names() {
    static const std::vector<std::string> names = {
        "stump", "tree", "adaboost_m1", "logitboost", "decision_table", "random_subspace",
    };
    return names;
}

std::unique_ptr<Model> train_model(const std::string& name, const Matrix& X,
                                   const std::vector<int>& y,
                                   const std::vector<std::string>& class_names,
                                   const Hyperparams& hp, std::uint64_t seed) {
    if (name == "stump") {
        std::vector<double> w(y.size(), 1.0 / static_cast<double>(y.size()));
        return std::make_unique<Stump>(train_stump(X, y, w, class_names));
    }
    if (name == "tree") {
        TreeOptions opts;
        opts.max_depth = hp.tree_depth;
        return std::make_unique<Tree>(train_tree(X, y, class_names, opts));
    }
    if (name == "adaboost_m1")
        return std::make_unique<AdaBoost>(
            train_adaboost_m1(X, y, class_names, hp.boost_rounds, seed));
    if (name == "logitboost")
        return std::make_unique<LogitBoost>(
            train_logitboost(X, y, class_names, hp.boost_rounds, seed));
    if (name == "decision_table")
        return std::make_unique<DecisionTable>(
            train_decision_table(X, y, class_names, hp.table_max_features, hp.table_bins));
    if (name == "random_subspace") {
        SubspaceOptions opts;
        opts.members = hp.subspace_members;
        opts.fraction = hp.subspace_fraction;
        opts.depth = hp.tree_depth;
        return std::make_unique<RandomSubspace>(
            train_random_subspace(X, y, class_names, opts, seed));
    }
    throw Error(ErrorCode::ConfigError, "unknown model name " + name);
}

}  // namespace xidps
