#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "xidps/errors.hpp"
#include "xidps/learners.hpp"

namespace xidps {

DecisionTable::DecisionTable(std::size_t n_features, std::vector<std::string> classes,
                             std::vector<int> features, std::vector<std::vector<double>> bin_edges,
                             std::vector<std::pair<std::uint64_t, Vector>> cells,
                             Vector default_dist)
    : n_features_(n_features),
      features_(std::move(features)),
      bin_edges_(std::move(bin_edges)),
      default_dist_(std::move(default_dist)) {
    classes_ = std::move(classes);
    std::sort(cells.begin(), cells.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [key, dist] : cells) {
        cell_keys_.push_back(key);
        cell_dists_.push_back(std::move(dist));
    }
}

namespace {

std::size_t bin_of(const std::vector<double>& edges, double v) {
    return static_cast<std::size_t>(
        std::distance(edges.begin(), std::lower_bound(edges.begin(), edges.end(), v)));
}

}  // namespace

std::uint64_t DecisionTable::key_of(const double* x) const {
    std::uint64_t key = 0, stride = 1;
    for (std::size_t i = 0; i < features_.size(); ++i) {
        key += stride * bin_of(bin_edges_[i], x[features_[i]]);
        stride *= bin_edges_[i].size() + 1;
    }
    return key;
}

void DecisionTable::score_into(const double* x, double* out) const {
    const std::uint64_t key = key_of(x);
    auto it = std::lower_bound(cell_keys_.begin(), cell_keys_.end(), key);
    const Vector& d = (it != cell_keys_.end() && *it == key)
                          ? cell_dists_[static_cast<std::size_t>(it - cell_keys_.begin())]
                          : default_dist_;
    for (Eigen::Index c = 0; c < d.size(); ++c) out[c] = d[c];
}

nlohmann::json DecisionTable::to_json() const {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : bin_edges_) edges.push_back(e);
    nlohmann::json cells = nlohmann::json::array();
    for (std::size_t i = 0; i < cell_keys_.size(); ++i)
        cells.push_back(
            {{"key", cell_keys_[i]},
             {"dist", std::vector<double>(cell_dists_[i].begin(), cell_dists_[i].end())}});
    return {{"kind", kind()},
            {"classes", classes_},
            {"n_features", n_features_},
            {"features", features_},
            {"bin_edges", std::move(edges)},
            {"cells", std::move(cells)},
            {"default_dist", std::vector<double>(default_dist_.begin(), default_dist_.end())}};
}

DecisionTable DecisionTable::from_json(const nlohmann::json& j) {
    std::vector<std::vector<double>> edges;
    for (const auto& e : j.at("bin_edges")) edges.push_back(e.get<std::vector<double>>());
    std::vector<std::pair<std::uint64_t, Vector>> cells;
    for (const auto& c : j.at("cells")) {
        auto d = c.at("dist").get<std::vector<double>>();
        cells.emplace_back(c.at("key").get<std::uint64_t>(),
                           Eigen::Map<const Vector>(d.data(), static_cast<Eigen::Index>(d.size())));
    }
    auto dd = j.at("default_dist").get<std::vector<double>>();
    return DecisionTable(j.at("n_features"), j.at("classes").get<std::vector<std::string>>(),
                         j.at("features").get<std::vector<int>>(), std::move(edges),
                         std::move(cells),
                         Eigen::Map<const Vector>(dd.data(), static_cast<Eigen::Index>(dd.size())));
}

namespace {

// equal-frequency cut points; boundaries between equal values are dropped
std::vector<double> equal_frequency_edges(const Matrix& X, int feature, int bins) {
    const int n = static_cast<int>(X.rows());
    std::vector<double> sorted(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) sorted[static_cast<std::size_t>(r)] = X(r, feature);
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> edges;
    for (int b = 1; b < bins; ++b) {
        const int pos = static_cast<int>(
            std::llround(static_cast<double>(b) * n / static_cast<double>(bins)));
        if (pos <= 0 || pos >= n) continue;
        const double lo = sorted[static_cast<std::size_t>(pos - 1)];
        const double hi = sorted[static_cast<std::size_t>(pos)];
        if (hi > lo) edges.push_back(lo + (hi - lo) / 2.0);
    }
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

struct SubsetAccuracy {
    // training accuracy of the binned table over the given per-row keys
    static double eval(const std::vector<std::uint64_t>& keys, const std::vector<int>& y, int k) {
        std::unordered_map<std::uint64_t, int> slot;
        slot.reserve(keys.size());
        std::vector<int> counts;
        for (std::size_t r = 0; r < keys.size(); ++r) {
            auto [it, inserted] = slot.emplace(keys[r], static_cast<int>(slot.size()));
            if (inserted) counts.resize(counts.size() + static_cast<std::size_t>(k), 0);
            ++counts[static_cast<std::size_t>(it->second) * static_cast<std::size_t>(k) +
                     static_cast<std::size_t>(y[r])];
        }
        long correct = 0;
        for (std::size_t s = 0; s < slot.size(); ++s) {
            int best = 0;
            for (int c = 0; c < k; ++c)
                best = std::max(best, counts[s * static_cast<std::size_t>(k) +
                                             static_cast<std::size_t>(c)]);
            correct += best;
        }
        return static_cast<double>(correct) / static_cast<double>(keys.size());
    }
};

}  // namespace

DecisionTable train_decision_table(const Matrix& X, const std::vector<int>& y,
                                   const std::vector<std::string>& class_names, int max_features,
                                   int bins) {
    if (max_features < 1) throw Error(ErrorCode::ConfigError, "max_features must be >= 1");
    if (bins < 2) throw Error(ErrorCode::ConfigError, "bins must be >= 2");
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    const int k = static_cast<int>(class_names.size());
    if (n == 0) throw Error(ErrorCode::EmptyData, "no rows");

    std::vector<std::vector<double>> all_edges(static_cast<std::size_t>(p));
    std::vector<std::vector<std::uint8_t>> row_bins(static_cast<std::size_t>(p));
    for (int f = 0; f < p; ++f) {
        all_edges[static_cast<std::size_t>(f)] = equal_frequency_edges(X, f, bins);
        auto& rb = row_bins[static_cast<std::size_t>(f)];
        rb.resize(static_cast<std::size_t>(n));
        for (int r = 0; r < n; ++r)
            rb[static_cast<std::size_t>(r)] =
                static_cast<std::uint8_t>(bin_of(all_edges[static_cast<std::size_t>(f)], X(r, f)));
    }

    Vector overall = Vector::Zero(k);
    for (int c : y) overall[c] += 1.0;
    const double majority_acc = overall.maxCoeff() / static_cast<double>(n);
    overall /= static_cast<double>(n);

    // forward selection; plateaus are walked through, the smallest subset
    // with the best accuracy seen is kept
    std::vector<int> selected;
    std::vector<int> best_subset;
    double best_acc = majority_acc;
    double current_acc = majority_acc;

    std::vector<std::uint64_t> base_keys(static_cast<std::size_t>(n), 0);
    std::uint64_t stride = 1;
    std::vector<char> used(static_cast<std::size_t>(p), 0);
    std::vector<std::uint64_t> cand_keys(static_cast<std::size_t>(n));

    while (static_cast<int>(selected.size()) < max_features) {
        int pick = -1;
        double pick_acc = -1.0;
        for (int f = 0; f < p; ++f) {
            if (used[static_cast<std::size_t>(f)]) continue;
            const std::uint64_t width = all_edges[static_cast<std::size_t>(f)].size() + 1;
            if (width > 1 && stride > UINT64_MAX / width)
                throw Error(ErrorCode::ConfigError, "bin key overflow");
            const auto& rb = row_bins[static_cast<std::size_t>(f)];
            for (int r = 0; r < n; ++r)
                cand_keys[static_cast<std::size_t>(r)] =
                    base_keys[static_cast<std::size_t>(r)] +
                    stride * rb[static_cast<std::size_t>(r)];
            const double acc = SubsetAccuracy::eval(cand_keys, y, k);
            if (acc > pick_acc) {  // strict: lowest feature index wins ties
                pick_acc = acc;
                pick = f;
            }
        }
        if (pick < 0 || pick_acc < current_acc) break;
        used[static_cast<std::size_t>(pick)] = 1;
        selected.push_back(pick);
        const auto& rb = row_bins[static_cast<std::size_t>(pick)];
        for (int r = 0; r < n; ++r)
            base_keys[static_cast<std::size_t>(r)] += stride * rb[static_cast<std::size_t>(r)];
        stride *= all_edges[static_cast<std::size_t>(pick)].size() + 1;
        current_acc = pick_acc;
        if (pick_acc > best_acc) {
            best_acc = pick_acc;
            best_subset = selected;
        }
    }

    // rebuild cells for the winning subset
    std::vector<std::vector<double>> edges;
    for (int f : best_subset) edges.push_back(all_edges[static_cast<std::size_t>(f)]);

    std::vector<std::uint64_t> keys(static_cast<std::size_t>(n), 0);
    std::uint64_t s2 = 1;
    for (std::size_t i = 0; i < best_subset.size(); ++i) {
        const auto& rb = row_bins[static_cast<std::size_t>(best_subset[i])];
        for (int r = 0; r < n; ++r)
            keys[static_cast<std::size_t>(r)] += s2 * rb[static_cast<std::size_t>(r)];
        s2 *= edges[i].size() + 1;
    }

    std::unordered_map<std::uint64_t, Vector> cell_counts;
    for (int r = 0; r < n; ++r) {
        auto [it, inserted] = cell_counts.try_emplace(keys[static_cast<std::size_t>(r)]);
        if (inserted) it->second = Vector::Zero(k);
        it->second[y[static_cast<std::size_t>(r)]] += 1.0;
    }
    std::vector<std::pair<std::uint64_t, Vector>> cells;
    cells.reserve(cell_counts.size());
    for (auto& [key, counts] : cell_counts) cells.emplace_back(key, counts / counts.sum());

    return DecisionTable(static_cast<std::size_t>(p), class_names, best_subset, std::move(edges),
                         std::move(cells), overall);
}

}  // namespace xidps
