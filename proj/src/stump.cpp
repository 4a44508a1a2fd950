#include <algorithm>
#include <cmath>

#include "xidps/errors.hpp"
#include "xidps/learners.hpp"

namespace xidps {

Stump::Stump(std::size_t n_features, std::vector<std::string> classes, int feature,
             double threshold, Vector left_votes, Vector right_votes)
    : n_features_(n_features),
      feature_(feature),
      threshold_(threshold),
      left_votes_(std::move(left_votes)),
      right_votes_(std::move(right_votes)) {
    classes_ = std::move(classes);
}

void Stump::score_into(const double* x, double* out) const {
    const Vector& v = x[feature_] <= threshold_ ? left_votes_ : right_votes_;
    for (Eigen::Index c = 0; c < v.size(); ++c) out[c] = v[c];
}

nlohmann::json Stump::to_json() const {
    return {{"kind", kind()},
            {"classes", classes_},
            {"n_features", n_features_},
            {"feature", feature_},
            {"threshold", threshold_},
            {"left_votes", std::vector<double>(left_votes_.begin(), left_votes_.end())},
            {"right_votes", std::vector<double>(right_votes_.begin(), right_votes_.end())}};
}

Stump Stump::from_json(const nlohmann::json& j) {
    auto lv = j.at("left_votes").get<std::vector<double>>();
    auto rv = j.at("right_votes").get<std::vector<double>>();
    return Stump(j.at("n_features"), j.at("classes").get<std::vector<std::string>>(),
                 j.at("feature"), j.at("threshold"),
                 Eigen::Map<const Vector>(lv.data(), static_cast<Eigen::Index>(lv.size())),
                 Eigen::Map<const Vector>(rv.data(), static_cast<Eigen::Index>(rv.size())));
}

namespace {

Vector side_distribution(const Vector& hist, const Vector& overall) {
    const double total = hist.sum();
    if (total <= 0.0) return overall;
    return hist / total;
}

}  // namespace

Stump train_stump(const Matrix& X, const std::vector<int>& y, const std::vector<double>& w,
                  const std::vector<std::string>& class_names, const FeatureOrder* order) {
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    const int k = static_cast<int>(class_names.size());
    if (n == 0) throw Error(ErrorCode::EmptyData, "no rows");
    if (static_cast<int>(y.size()) != n || static_cast<int>(w.size()) != n)
        throw Error(ErrorCode::ShapeMismatch, "y/w length differs from row count");

    double total_w = 0.0;
    for (double wi : w) {
        if (wi < 0.0) throw Error(ErrorCode::ConfigError, "negative row weight");
        total_w += wi;
    }
    if (total_w <= 0.0) throw Error(ErrorCode::ConfigError, "row weights sum to zero");

    FeatureOrder local;
    if (!order) {
        local = FeatureOrder::build(X);
        order = &local;
    }

    Vector overall = Vector::Zero(k);
    for (int r = 0; r < n; ++r) overall[y[static_cast<std::size_t>(r)]] += w[static_cast<std::size_t>(r)];
    overall /= total_w;

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_correct = -1.0;  // maximizing correct weight minimizes error

    std::vector<double> left_w(static_cast<std::size_t>(k));
    std::vector<double> suffix_max(static_cast<std::size_t>(n) + 1);
    std::vector<double> right_w(static_cast<std::size_t>(k));

    for (int f = 0; f < p; ++f) {
        const auto& ord = order->by_feature[static_cast<std::size_t>(f)];
        const auto col = X.col(f);
        if (col[ord.front()] == col[ord.back()]) continue;  // constant feature

        // suffix_max[i] = best single-class weight among rows ranked i..n-1
        std::fill(right_w.begin(), right_w.end(), 0.0);
        double run_max = 0.0;
        suffix_max[static_cast<std::size_t>(n)] = 0.0;
        for (int i = n - 1; i >= 0; --i) {
            const int r = ord[static_cast<std::size_t>(i)];
            double& cw = right_w[static_cast<std::size_t>(y[static_cast<std::size_t>(r)])];
            cw += w[static_cast<std::size_t>(r)];
            run_max = std::max(run_max, cw);
            suffix_max[static_cast<std::size_t>(i)] = run_max;
        }

        std::fill(left_w.begin(), left_w.end(), 0.0);
        double left_max = 0.0;
        for (int i = 1; i < n; ++i) {
            const int r = ord[static_cast<std::size_t>(i - 1)];
            double& cw = left_w[static_cast<std::size_t>(y[static_cast<std::size_t>(r)])];
            cw += w[static_cast<std::size_t>(r)];
            left_max = std::max(left_max, cw);
            const double prev = col[ord[static_cast<std::size_t>(i - 1)]];
            const double cur = col[ord[static_cast<std::size_t>(i)]];
            if (prev == cur) continue;
            const double correct = left_max + suffix_max[static_cast<std::size_t>(i)];
            if (correct > best_correct) {  // strict: first feature / lowest threshold wins ties
                best_correct = correct;
                best_feature = f;
                best_threshold = prev + (cur - prev) / 2.0;
            }
        }
    }

    if (best_feature < 0)
        throw Error(ErrorCode::DegenerateData, "all rows identical, no split candidates");

    Vector lh = Vector::Zero(k), rh = Vector::Zero(k);
    const auto col = X.col(best_feature);
    for (int r = 0; r < n; ++r) {
        (col[r] <= best_threshold ? lh : rh)[y[static_cast<std::size_t>(r)]] +=
            w[static_cast<std::size_t>(r)];
    }
    return Stump(static_cast<std::size_t>(p), class_names, best_feature, best_threshold,
                 side_distribution(lh, overall), side_distribution(rh, overall));
}

}  // namespace xidps
