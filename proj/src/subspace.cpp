#include <algorithm>
#include <cmath>

#include "xidps/errors.hpp"
#include "xidps/learners.hpp"
#include "xidps/rng.hpp"

namespace xidps {

RandomSubspace::RandomSubspace(std::size_t n_features, std::vector<std::string> classes,
                               std::vector<Tree> trees, std::vector<std::vector<int>> subsets,
                               double fraction, std::uint64_t seed)
    : n_features_(n_features),
      trees_(std::move(trees)),
      subsets_(std::move(subsets)),
      fraction_(fraction),
      seed_(seed) {
    classes_ = std::move(classes);
}

void RandomSubspace::score_into(const double* x, double* out) const {
    const std::size_t k = classes_.size();
    for (std::size_t c = 0; c < k; ++c) out[c] = 0.0;
    std::vector<double> member(k);
    for (const auto& tree : trees_) {
        tree.score_into(x, member.data());
        for (std::size_t c = 0; c < k; ++c) out[c] += member[c];
    }
    const double inv = 1.0 / static_cast<double>(trees_.size());
    for (std::size_t c = 0; c < k; ++c) out[c] *= inv;
}

nlohmann::json RandomSubspace::to_json() const {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : trees_) trees.push_back(t.to_json());
    nlohmann::json subsets = nlohmann::json::array();
    for (const auto& s : subsets_) subsets.push_back(s);
    return {{"kind", kind()},      {"classes", classes_}, {"n_features", n_features_},
            {"trees", std::move(trees)}, {"subsets", std::move(subsets)},
            {"fraction", fraction_},     {"seed", seed_}};
}

RandomSubspace RandomSubspace::from_json(const nlohmann::json& j) {
    std::vector<Tree> trees;
    for (const auto& t : j.at("trees")) trees.push_back(Tree::from_json(t));
    std::vector<std::vector<int>> subsets;
    for (const auto& s : j.at("subsets")) subsets.push_back(s.get<std::vector<int>>());
    return RandomSubspace(j.at("n_features"), j.at("classes").get<std::vector<std::string>>(),
                          std::move(trees), std::move(subsets), j.at("fraction"), j.at("seed"));
}

RandomSubspace train_random_subspace(const Matrix& X, const std::vector<int>& y,
                                     const std::vector<std::string>& class_names,
                                     const SubspaceOptions& opts, std::uint64_t seed) {
    if (opts.members < 1) throw Error(ErrorCode::ConfigError, "members must be >= 1");
    if (!(opts.fraction > 0.0 && opts.fraction <= 1.0))
        throw Error(ErrorCode::ConfigError, "fraction must lie in (0,1]");
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    if (n == 0) throw Error(ErrorCode::EmptyData, "no rows");

    const auto subset_size = static_cast<std::size_t>(
        std::ceil(opts.fraction * static_cast<double>(p)));

    std::vector<Tree> trees;
    std::vector<std::vector<int>> subsets;
    trees.reserve(static_cast<std::size_t>(opts.members));
    TreeOptions topts;
    topts.max_depth = opts.depth;

    for (int m = 0; m < opts.members; ++m) {
        // member seeds derived by rule: seed + member index
        Rng rng(seed + static_cast<std::uint64_t>(m));
        auto drawn = rng.sample_without_replacement(static_cast<std::size_t>(p), subset_size);
        std::vector<int> subset(drawn.begin(), drawn.end());
        trees.push_back(train_tree(X, y, class_names, topts, &subset));
        subsets.push_back(std::move(subset));
    }
    return RandomSubspace(static_cast<std::size_t>(p), class_names, std::move(trees),
                          std::move(subsets), opts.fraction, seed);
}

}  // namespace xidps
