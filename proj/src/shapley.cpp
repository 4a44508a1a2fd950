#include "xidps/shapley.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "xidps/errors.hpp"
#include "xidps/rng.hpp"
#include "xidps/schema.hpp"

namespace xidps {

namespace {
constexpr int kExactBound = 15;  // coalition enumeration limit
}

BackgroundSet BackgroundSet::sample(const Matrix& X, std::size_t size, std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(X.rows());
    if (n == 0) throw Error(ErrorCode::EmptyData, "cannot sample background from empty matrix");
    if (size > n) size = n;
    Rng rng(seed);
    auto idx = rng.sample_without_replacement(n, size);
    std::sort(idx.begin(), idx.end());
    BackgroundSet bg;
    bg.rows.resize(static_cast<Eigen::Index>(size), X.cols());
    for (std::size_t i = 0; i < size; ++i)
        bg.rows.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(idx[i]));
    return bg;
}

std::string ExplainTarget::describe(const std::vector<std::string>& classes) const {
    if (kind == Kind::Anomaly) return "anomaly";
    return "class:" + classes[static_cast<std::size_t>(index)];
}

double eval_target(const Model& model, const ExplainTarget& target, const double* x,
                   double* scratch) {
    model.score_into(x, scratch);
    if (target.kind == ExplainTarget::Kind::Anomaly) return 1.0 - scratch[target.index];
    return scratch[target.index];
}

ShapExplanation shap_exact(const Model& model, const ExplainTarget& target,
                           const Eigen::Ref<const Vector>& x, const BackgroundSet& background,
                           const std::vector<int>& features) {
    const int m = static_cast<int>(features.size());
    if (m > kExactBound)
        throw Error(ErrorCode::SubsetTooLarge,
                    "exact enumeration handles at most " + std::to_string(kExactBound) +
                        " features, got " + std::to_string(m));
    if (static_cast<std::size_t>(x.size()) != model.n_features())
        throw Error(ErrorCode::ArityMismatch, "instance arity differs from model");
    const auto b_count = static_cast<Eigen::Index>(background.size());
    if (b_count == 0) throw Error(ErrorCode::EmptyData, "background set is empty");

    std::vector<double> scratch(model.n_classes());
    const std::size_t n_masks = std::size_t{1} << m;

    // value of a coalition: mean model output over background rows, with the
    // coalition (and everything outside the subset) at instance values
    std::vector<double> value(n_masks, 0.0);
    Vector z(x.size());
    for (Eigen::Index b = 0; b < b_count; ++b) {
        for (std::size_t mask = 0; mask < n_masks; ++mask) {
            z = x;
            for (int i = 0; i < m; ++i) {
                if (!(mask & (std::size_t{1} << i))) {
                    const int f = features[static_cast<std::size_t>(i)];
                    z[f] = background.rows(b, f);
                }
            }
            value[mask] += eval_target(model, target, z.data(), scratch.data());
        }
    }
    for (double& v : value) v /= static_cast<double>(b_count);

    // Shapley kernel weights |S|! (m-|S|-1)! / m!
    std::vector<double> weight(static_cast<std::size_t>(m), 0.0);
    {
        std::vector<double> fact(static_cast<std::size_t>(m) + 1, 1.0);
        for (int i = 1; i <= m; ++i)
            fact[static_cast<std::size_t>(i)] = fact[static_cast<std::size_t>(i - 1)] * i;
        for (int s = 0; s < m; ++s)
            weight[static_cast<std::size_t>(s)] = fact[static_cast<std::size_t>(s)] *
                                                  fact[static_cast<std::size_t>(m - s - 1)] /
                                                  fact[static_cast<std::size_t>(m)];
    }

    ShapExplanation out;
    out.phi = Vector::Zero(x.size());
    for (int i = 0; i < m; ++i) {
        const std::size_t bit = std::size_t{1} << i;
        double phi = 0.0;
        for (std::size_t mask = 0; mask < n_masks; ++mask) {
            if (mask & bit) continue;
            const int s = std::popcount(mask);
            phi += weight[static_cast<std::size_t>(s)] * (value[mask | bit] - value[mask]);
        }
        out.phi[features[static_cast<std::size_t>(i)]] = phi;
    }
    out.base_value = value[0];
    out.f_x = value[n_masks - 1];
    return out;
}

ShapExplanation shap_permutation(const Model& model, const ExplainTarget& target,
                                 const Eigen::Ref<const Vector>& x,
                                 const BackgroundSet& background, int n_permutations,
                                 std::uint64_t seed) {
    if (n_permutations < 1) throw Error(ErrorCode::ConfigError, "n_permutations must be >= 1");
    if (static_cast<std::size_t>(x.size()) != model.n_features())
        throw Error(ErrorCode::ArityMismatch, "instance arity differs from model");
    const auto b_count = static_cast<Eigen::Index>(background.size());
    if (b_count == 0) throw Error(ErrorCode::EmptyData, "background set is empty");

    const int p = static_cast<int>(x.size());
    std::vector<double> scratch(model.n_classes());
    Rng rng(seed);

    std::vector<int> perm(static_cast<std::size_t>(p));
    std::iota(perm.begin(), perm.end(), 0);

    ShapExplanation out;
    out.phi = Vector::Zero(p);

    // per-permutation walk: every background row flips to the instance value
    // one feature at a time, each step averaged over the whole background
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const RowMajor bg_rows = background.rows;
    RowMajor z;
    double base = 0.0;
    for (int t = 0; t < n_permutations; ++t) {
        rng.shuffle(perm);
        z = bg_rows;
        double prev = 0.0;
        for (Eigen::Index b = 0; b < b_count; ++b)
            prev += eval_target(model, target, z.row(b).data(), scratch.data());
        prev /= static_cast<double>(b_count);
        base += prev;

        for (int j = 0; j < p; ++j) {
            const int f = perm[static_cast<std::size_t>(j)];
            z.col(f).setConstant(x[f]);
            double cur = 0.0;
            for (Eigen::Index b = 0; b < b_count; ++b)
                cur += eval_target(model, target, z.row(b).data(), scratch.data());
            cur /= static_cast<double>(b_count);
            out.phi[f] += cur - prev;
            prev = cur;
        }
    }
    out.phi /= static_cast<double>(n_permutations);
    out.base_value = base / static_cast<double>(n_permutations);
    const Vector xc = x;
    out.f_x = eval_target(model, target, xc.data(), scratch.data());
    return out;
}

namespace {

// largest-remainder apportionment of the explanation budget over classes
std::vector<std::size_t> apportion(const std::vector<std::size_t>& class_sizes,
                                   std::size_t budget, std::size_t total) {
    const std::size_t k = class_sizes.size();
    std::vector<std::size_t> take(k, 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < k; ++c) {
        const double quota = static_cast<double>(budget) * static_cast<double>(class_sizes[c]) /
                             static_cast<double>(total);
        take[c] = static_cast<std::size_t>(quota);
        if (take[c] > class_sizes[c]) take[c] = class_sizes[c];
        assigned += take[c];
        remainders.emplace_back(quota - std::floor(quota), c);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (const auto& [frac, c] : remainders) {
        if (assigned >= budget) break;
        if (take[c] < class_sizes[c]) {
            ++take[c];
            ++assigned;
        }
    }
    return take;
}

}  // namespace

std::vector<ShapExplanation> explain_dataset(const Model& model, const Matrix& X,
                                             const std::vector<int>& labels,
                                             const std::vector<std::string>& class_names,
                                             const BackgroundSet& background,
                                             const ExplainOptions& opts) {
    const auto n = static_cast<std::size_t>(X.rows());
    if (n == 0) throw Error(ErrorCode::EmptyData, "nothing to explain");
    if (opts.budget < 1) throw Error(ErrorCode::ConfigError, "budget must be >= 1");

    int normal_index = -1;
    if (opts.mode == ExplainMode::Anomaly) {
        for (std::size_t c = 0; c < model.classes().size(); ++c)
            if (is_normal_class(model.classes()[c])) normal_index = static_cast<int>(c);
        if (normal_index < 0)
            throw Error(ErrorCode::ConfigError, "anomaly mode needs a Normal class");
    }

    // stratified, seed-deterministic pick of budget rows
    std::vector<std::size_t> picked;
    if (opts.budget >= n) {
        picked.resize(n);
        std::iota(picked.begin(), picked.end(), std::size_t{0});
    } else {
        std::vector<std::vector<std::size_t>> by_class(class_names.size());
        for (std::size_t r = 0; r < n; ++r)
            by_class[static_cast<std::size_t>(labels[r])].push_back(r);
        std::vector<std::size_t> sizes;
        sizes.reserve(by_class.size());
        for (const auto& v : by_class) sizes.push_back(v.size());
        const auto take = apportion(sizes, opts.budget, n);
        for (std::size_t c = 0; c < by_class.size(); ++c) {
            Rng rng(opts.seed * 0x9e3779b97f4a7c15ULL + c + 1);
            rng.shuffle(by_class[c]);
            for (std::size_t i = 0; i < take[c]; ++i) picked.push_back(by_class[c][i]);
        }
        std::sort(picked.begin(), picked.end());
    }

    const int p = static_cast<int>(X.cols());
    std::vector<int> all_features(static_cast<std::size_t>(p));
    std::iota(all_features.begin(), all_features.end(), 0);

    std::vector<ShapExplanation> out;
    out.reserve(picked.size());
    for (std::size_t i = 0; i < picked.size(); ++i) {
        const Vector row = X.row(static_cast<Eigen::Index>(picked[i])).transpose();
        ExplainTarget target = opts.mode == ExplainMode::Anomaly
                                   ? ExplainTarget::anomaly(normal_index)
                                   : ExplainTarget::class_score(predict_index(model, row));
        ShapExplanation e =
            p <= kExactBound
                ? shap_exact(model, target, row, background, all_features)
                : shap_permutation(model, target, row, background, opts.n_permutations,
                                   opts.seed + i);
        e.target = target.describe(model.classes());
        out.push_back(std::move(e));
    }
    return out;
}

FeatureRanking rank_features(const std::vector<ShapExplanation>& explanations,
                             const std::vector<std::string>& feature_names,
                             const std::vector<std::string>& source_columns, ExplainMode mode) {
    if (explanations.empty()) throw Error(ErrorCode::EmptyData, "no explanations to rank");
    const auto p = static_cast<Eigen::Index>(feature_names.size());
    for (const auto& e : explanations) {
        if (e.phi.size() != p)
            throw Error(ErrorCode::ShapeMismatch, "phi length differs from feature names");
    }

    Vector mean_abs = Vector::Zero(p);
    for (const auto& e : explanations) mean_abs += e.phi.cwiseAbs();
    mean_abs /= static_cast<double>(explanations.size());

    // collapse one-hot expansions onto their source attribute
    std::unordered_map<std::string, double> by_attribute;
    std::vector<std::string> order;
    for (Eigen::Index j = 0; j < p; ++j) {
        std::string attr;
        if (static_cast<std::size_t>(j) < source_columns.size()) {
            attr = source_columns[static_cast<std::size_t>(j)];
        } else {
            const std::string& name = feature_names[static_cast<std::size_t>(j)];
            const auto eq = name.find('=');
            attr = eq == std::string::npos ? name : name.substr(0, eq);
        }
        auto [it, inserted] = by_attribute.emplace(attr, 0.0);
        if (inserted) order.push_back(attr);
        it->second += mean_abs[j];
    }

    FeatureRanking ranking;
    ranking.mode = mode;
    for (const auto& attr : order) ranking.entries.emplace_back(attr, by_attribute[attr]);
    std::sort(ranking.entries.begin(), ranking.entries.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return ranking;
}

std::vector<std::string> select_top_k(const FeatureRanking& ranking, int k) {
    if (k < 1 || static_cast<std::size_t>(k) > ranking.size())
        throw Error(ErrorCode::KOutOfRange, "k must lie in [1, " + std::to_string(ranking.size()) +
                                                "], got " + std::to_string(k));
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) out.push_back(ranking.entries[static_cast<std::size_t>(i)].first);
    return out;
}

std::string ranking_to_csv(const FeatureRanking& ranking, const std::string& fingerprint) {
    std::ostringstream out;
    out << "# config_fingerprint=" << fingerprint << "\n";
    out << "feature,mean_abs_shap\n";
    out.precision(17);
    for (const auto& [name, value] : ranking.entries) out << name << "," << value << "\n";
    return out.str();
}

}  // namespace xidps
