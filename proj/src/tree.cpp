#include <algorithm>
#include <cmath>
#include <numeric>

#include "xidps/errors.hpp"
#include "xidps/learners.hpp"

namespace xidps {

Tree::Tree(std::size_t n_features, std::vector<std::string> classes, std::vector<Node> nodes,
           int max_depth)
    : n_features_(n_features), nodes_(std::move(nodes)), max_depth_(max_depth) {
    classes_ = std::move(classes);
}

void Tree::score_into(const double* x, double* out) const {
    int at = 0;
    while (nodes_[static_cast<std::size_t>(at)].feature >= 0) {
        const Node& nd = nodes_[static_cast<std::size_t>(at)];
        at = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
    }
    const Vector& d = nodes_[static_cast<std::size_t>(at)].dist;
    for (Eigen::Index c = 0; c < d.size(); ++c) out[c] = d[c];
}

int Tree::depth() const {
    // iterative depth over the node vector
    std::vector<int> level(nodes_.size(), 0);
    int deepest = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& nd = nodes_[i];
        deepest = std::max(deepest, level[i]);
        if (nd.feature >= 0) {
            level[static_cast<std::size_t>(nd.left)] = level[i] + 1;
            level[static_cast<std::size_t>(nd.right)] = level[i] + 1;
        }
    }
    return deepest;
}

nlohmann::json Tree::to_json() const {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& nd : nodes_) {
        nlohmann::json n = {{"feature", nd.feature}};
        if (nd.feature >= 0) {
            n["threshold"] = nd.threshold;
            n["left"] = nd.left;
            n["right"] = nd.right;
        } else {
            n["dist"] = std::vector<double>(nd.dist.begin(), nd.dist.end());
        }
        nodes.push_back(std::move(n));
    }
    return {{"kind", kind()},
            {"classes", classes_},
            {"n_features", n_features_},
            {"max_depth", max_depth_},
            {"nodes", std::move(nodes)}};
}

Tree Tree::from_json(const nlohmann::json& j) {
    std::vector<Node> nodes;
    for (const auto& n : j.at("nodes")) {
        Node nd;
        nd.feature = n.at("feature");
        if (nd.feature >= 0) {
            nd.threshold = n.at("threshold");
            nd.left = n.at("left");
            nd.right = n.at("right");
        } else {
            auto d = n.at("dist").get<std::vector<double>>();
            nd.dist = Eigen::Map<const Vector>(d.data(), static_cast<Eigen::Index>(d.size()));
        }
        nodes.push_back(std::move(nd));
    }
    return Tree(j.at("n_features"), j.at("classes").get<std::vector<std::string>>(),
                std::move(nodes), j.at("max_depth"));
}

namespace {

struct TreeBuilder {
    const Matrix& X;
    const std::vector<int>& y;
    int n_classes;
    TreeOptions opts;
    std::vector<int> feats;  // candidate features, ascending
    std::vector<Tree::Node> nodes;
    std::vector<char> goes_left;  // row-indexed scratch

    int build(std::vector<std::vector<int>>& lists, int depth) {
        const auto& rows = lists.front();
        const int n = static_cast<int>(rows.size());

        std::vector<double> counts(static_cast<std::size_t>(n_classes), 0.0);
        for (int r : rows) counts[static_cast<std::size_t>(y[static_cast<std::size_t>(r)])] += 1.0;
        const bool pure = *std::max_element(counts.begin(), counts.end()) == n;

        int best_fi = -1;
        double best_threshold = 0.0;
        int best_prefix = 0;
        if (!pure && depth < opts.max_depth && n >= 2 * opts.min_leaf) {
            // parent objective: sum of squared class counts over node size
            double parent_s = 0.0;
            for (double c : counts) parent_s += c * c;
            double best_obj = parent_s / n * (1.0 + 1e-12);

            std::vector<double> left(static_cast<std::size_t>(n_classes));
            std::vector<double> right(static_cast<std::size_t>(n_classes));
            for (std::size_t fi = 0; fi < feats.size(); ++fi) {
                const auto col = X.col(feats[fi]);
                const auto& ord = lists[fi];
                if (col[ord.front()] == col[ord.back()]) continue;

                std::fill(left.begin(), left.end(), 0.0);
                std::copy(counts.begin(), counts.end(), right.begin());
                double s_left = 0.0, s_right = parent_s;
                for (int i = 1; i < n; ++i) {
                    const int cls = y[static_cast<std::size_t>(ord[static_cast<std::size_t>(i - 1)])];
                    double& lc = left[static_cast<std::size_t>(cls)];
                    double& rc = right[static_cast<std::size_t>(cls)];
                    s_left += 2.0 * lc + 1.0;
                    s_right += -2.0 * rc + 1.0;
                    lc += 1.0;
                    rc -= 1.0;
                    if (i < opts.min_leaf || n - i < opts.min_leaf) continue;
                    const double prev = col[ord[static_cast<std::size_t>(i - 1)]];
                    const double cur = col[ord[static_cast<std::size_t>(i)]];
                    if (prev == cur) continue;
                    const double obj = s_left / i + s_right / (n - i);
                    if (obj > best_obj) {
                        best_obj = obj;
                        best_fi = static_cast<int>(fi);
                        best_threshold = prev + (cur - prev) / 2.0;
                        best_prefix = i;
                    }
                }
            }
        }

        if (best_fi < 0) {
            Tree::Node leaf;
            leaf.dist = Eigen::Map<const Vector>(counts.data(), n_classes) / n;
            nodes.push_back(std::move(leaf));
            return static_cast<int>(nodes.size()) - 1;
        }

        const auto& split_ord = lists[static_cast<std::size_t>(best_fi)];
        for (int i = 0; i < n; ++i)
            goes_left[static_cast<std::size_t>(split_ord[static_cast<std::size_t>(i)])] =
                i < best_prefix ? 1 : 0;

        std::vector<std::vector<int>> left_lists(feats.size()), right_lists(feats.size());
        for (std::size_t fi = 0; fi < feats.size(); ++fi) {
            left_lists[fi].reserve(static_cast<std::size_t>(best_prefix));
            right_lists[fi].reserve(static_cast<std::size_t>(n - best_prefix));
            for (int r : lists[fi])
                (goes_left[static_cast<std::size_t>(r)] ? left_lists[fi] : right_lists[fi])
                    .push_back(r);
            lists[fi].clear();
            lists[fi].shrink_to_fit();
        }

        const int id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        nodes[static_cast<std::size_t>(id)].feature = feats[static_cast<std::size_t>(best_fi)];
        nodes[static_cast<std::size_t>(id)].threshold = best_threshold;
        const int left_id = build(left_lists, depth + 1);
        const int right_id = build(right_lists, depth + 1);
        nodes[static_cast<std::size_t>(id)].left = left_id;
        nodes[static_cast<std::size_t>(id)].right = right_id;
        return id;
    }
};

}  // namespace

Tree train_tree(const Matrix& X, const std::vector<int>& y,
                const std::vector<std::string>& class_names, const TreeOptions& opts,
                const std::vector<int>* feature_subset) {
    const int n = static_cast<int>(X.rows());
    if (n == 0) throw Error(ErrorCode::EmptyData, "no rows");
    if (static_cast<int>(y.size()) != n)
        throw Error(ErrorCode::ShapeMismatch, "y length differs from row count");

    TreeBuilder builder{X, y, static_cast<int>(class_names.size()), opts, {}, {}, {}};
    if (feature_subset) {
        builder.feats = *feature_subset;
        std::sort(builder.feats.begin(), builder.feats.end());
    } else {
        builder.feats.resize(static_cast<std::size_t>(X.cols()));
        std::iota(builder.feats.begin(), builder.feats.end(), 0);
    }
    builder.goes_left.assign(static_cast<std::size_t>(n), 0);

    FeatureOrder fo = FeatureOrder::build_subset(X, builder.feats);
    std::vector<std::vector<int>> lists(builder.feats.size());
    for (std::size_t fi = 0; fi < builder.feats.size(); ++fi)
        lists[fi] = std::move(fo.by_feature[static_cast<std::size_t>(builder.feats[fi])]);

    builder.build(lists, 0);
    return Tree(static_cast<std::size_t>(X.cols()), class_names, std::move(builder.nodes),
                opts.max_depth);
}

}  // namespace xidps
