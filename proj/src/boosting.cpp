#include <algorithm>
#include <cmath>

#include "xidps/boost_trace.hpp"
#include "xidps/errors.hpp"
#include "xidps/learners.hpp"

namespace xidps {

// ---------------------------------------------------------------------------
// AdaBoost.M1

AdaBoost::AdaBoost(std::size_t n_features, std::vector<std::string> classes,
                   std::vector<Stump> members, std::vector<double> alphas,
                   std::vector<double> epsilons)
    : n_features_(n_features),
      members_(std::move(members)),
      alphas_(std::move(alphas)),
      epsilons_(std::move(epsilons)) {
    classes_ = std::move(classes);
}

void AdaBoost::score_into(const double* x, double* out) const {
    const std::size_t k = classes_.size();
    for (std::size_t c = 0; c < k; ++c) out[c] = 0.0;
    double total = 0.0;
    std::vector<double> member_scores(k);
    for (std::size_t m = 0; m < members_.size(); ++m) {
        members_[m].score_into(x, member_scores.data());
        std::size_t best = 0;
        for (std::size_t c = 1; c < k; ++c)
            if (member_scores[c] > member_scores[best]) best = c;
        out[best] += alphas_[m];
        total += alphas_[m];
    }
    for (std::size_t c = 0; c < k; ++c) out[c] /= total;
}

nlohmann::json AdaBoost::to_json() const {
    nlohmann::json members = nlohmann::json::array();
    for (const auto& m : members_) members.push_back(m.to_json());
    return {{"kind", kind()},
            {"classes", classes_},
            {"n_features", n_features_},
            {"members", std::move(members)},
            {"alphas", alphas_},
            {"epsilons", epsilons_}};
}

AdaBoost AdaBoost::from_json(const nlohmann::json& j) {
    std::vector<Stump> members;
    for (const auto& m : j.at("members")) members.push_back(Stump::from_json(m));
    return AdaBoost(j.at("n_features"), j.at("classes").get<std::vector<std::string>>(),
                    std::move(members), j.at("alphas").get<std::vector<double>>(),
                    j.at("epsilons").get<std::vector<double>>());
}

namespace {

int stump_prediction(const Stump& s, const Matrix& X, int row) {
    const Vector& votes = X(row, s.feature()) <= s.threshold() ? s.left_votes() : s.right_votes();
    int best = 0;
    for (int c = 1; c < votes.size(); ++c)
        if (votes[c] > votes[best]) best = c;
    return best;
}

Stump majority_stump(const Matrix& X, const std::vector<int>& y,
                     const std::vector<std::string>& class_names) {
    Vector counts = Vector::Zero(static_cast<Eigen::Index>(class_names.size()));
    for (int c : y) counts[c] += 1.0;
    int best = 0;
    for (int c = 1; c < counts.size(); ++c)
        if (counts[c] > counts[best]) best = c;
    Vector votes = Vector::Zero(counts.size());
    votes[best] = 1.0;
    return Stump(static_cast<std::size_t>(X.cols()), class_names, 0, 0.0, votes, votes);
}

}  // namespace

AdaBoost train_adaboost_m1(const Matrix& X, const std::vector<int>& y,
                           const std::vector<std::string>& class_names, int rounds,
                           std::uint64_t seed, BoostTrace* trace) {
    (void)seed;  // the M1 loop is deterministic; kept for interface symmetry
    if (rounds < 1) throw Error(ErrorCode::RoundsZero, "rounds must be >= 1");
    const int n = static_cast<int>(X.rows());
    if (n == 0) throw Error(ErrorCode::EmptyData, "no rows");

    const FeatureOrder order = FeatureOrder::build(X);
    std::vector<double> w(static_cast<std::size_t>(n), 1.0 / n);

    std::vector<Stump> members;
    std::vector<double> alphas, epsilons;

    for (int t = 0; t < rounds; ++t) {
        Stump stump = train_stump(X, y, w, class_names, &order);

        double eps = 0.0;
        std::vector<char> correct(static_cast<std::size_t>(n), 0);
        for (int r = 0; r < n; ++r) {
            const int pred = stump_prediction(stump, X, r);
            if (pred == y[static_cast<std::size_t>(r)]) correct[static_cast<std::size_t>(r)] = 1;
            else eps += w[static_cast<std::size_t>(r)];
        }
        if (trace) trace->epsilons.push_back(eps);

        if (eps >= 0.5) break;

        if (eps == 0.0) {
            // perfect round: keep it with a capped vote weight, then stop
            const double beta_floor = 1e-10;
            members.push_back(std::move(stump));
            alphas.push_back(std::log(1.0 / beta_floor));
            epsilons.push_back(eps);
            if (trace) {
                trace->alphas.push_back(alphas.back());
                trace->weight_sums.push_back(1.0);
            }
            break;
        }

        const double beta = eps / (1.0 - eps);
        double sum = 0.0;
        for (int r = 0; r < n; ++r) {
            if (correct[static_cast<std::size_t>(r)]) w[static_cast<std::size_t>(r)] *= beta;
            sum += w[static_cast<std::size_t>(r)];
        }
        for (double& wi : w) wi /= sum;

        members.push_back(std::move(stump));
        alphas.push_back(std::log(1.0 / beta));
        epsilons.push_back(eps);
        if (trace) {
            trace->alphas.push_back(alphas.back());
            double check = 0.0;
            for (double wi : w) check += wi;
            trace->weight_sums.push_back(check);
        }
    }

    if (members.empty()) {
        // first stump was no better than chance; fall back to majority class
        members.push_back(majority_stump(X, y, class_names));
        alphas.push_back(1.0);
        epsilons.push_back(0.5);
    }
    return AdaBoost(static_cast<std::size_t>(X.cols()), class_names, std::move(members),
                    std::move(alphas), std::move(epsilons));
}

AdaBoost train_adaboost_m1(const Matrix& X, const std::vector<int>& y,
                           const std::vector<std::string>& class_names, int rounds,
                           std::uint64_t seed) {
    return train_adaboost_m1(X, y, class_names, rounds, seed, nullptr);
}

// ---------------------------------------------------------------------------
// LogitBoost

LogitBoost::LogitBoost(std::size_t n_features, std::vector<std::string> classes,
                       std::vector<std::vector<RegressionStump>> stages)
    : n_features_(n_features), stages_(std::move(stages)) {
    classes_ = std::move(classes);
}

namespace {

double eval_stages(const std::vector<RegressionStump>& stages, const double* x) {
    double f = 0.0;
    for (const auto& s : stages)
        f += x[s.feature] <= s.threshold ? s.left_value : s.right_value;
    return f;
}

double sigmoid2(double f) { return 1.0 / (1.0 + std::exp(-2.0 * f)); }

// weighted least-squares stump on working responses z
RegressionStump fit_regression_stump(const Matrix& X, const std::vector<double>& w,
                                     const std::vector<double>& z, const FeatureOrder& order) {
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());

    double sw = 0.0, swz = 0.0;
    for (int r = 0; r < n; ++r) {
        sw += w[static_cast<std::size_t>(r)];
        swz += w[static_cast<std::size_t>(r)] * z[static_cast<std::size_t>(r)];
    }
    const double mean = swz / sw;

    RegressionStump best;
    best.feature = 0;
    best.threshold = 0.0;
    best.left_value = mean;
    best.right_value = mean;
    double best_gain = swz * swz / sw;  // constant fit baseline

    for (int f = 0; f < p; ++f) {
        const auto& ord = order.by_feature[static_cast<std::size_t>(f)];
        const auto col = X.col(f);
        if (col[ord.front()] == col[ord.back()]) continue;
        double lw = 0.0, lwz = 0.0;
        for (int i = 1; i < n; ++i) {
            const int r = ord[static_cast<std::size_t>(i - 1)];
            lw += w[static_cast<std::size_t>(r)];
            lwz += w[static_cast<std::size_t>(r)] * z[static_cast<std::size_t>(r)];
            const double prev = col[ord[static_cast<std::size_t>(i - 1)]];
            const double cur = col[ord[static_cast<std::size_t>(i)]];
            if (prev == cur) continue;
            const double rw = sw - lw, rwz = swz - lwz;
            if (lw <= 0.0 || rw <= 0.0) continue;
            const double gain = lwz * lwz / lw + rwz * rwz / rw;
            if (gain > best_gain) {
                best_gain = gain;
                best.feature = f;
                best.threshold = prev + (cur - prev) / 2.0;
                best.left_value = lwz / lw;
                best.right_value = rwz / rw;
            }
        }
    }
    return best;
}

// single binary LogitBoost run; y_pos[i] is 1 when row i belongs to the
// positive class
std::vector<RegressionStump> logitboost_binary(const Matrix& X, const std::vector<char>& y_pos,
                                               int rounds, const FeatureOrder& order) {
    const int n = static_cast<int>(X.rows());
    std::vector<double> f_val(static_cast<std::size_t>(n), 0.0);
    std::vector<double> w(static_cast<std::size_t>(n)), z(static_cast<std::size_t>(n));
    std::vector<RegressionStump> stages;
    stages.reserve(static_cast<std::size_t>(rounds));

    for (int t = 0; t < rounds; ++t) {
        for (int r = 0; r < n; ++r) {
            double pr = sigmoid2(f_val[static_cast<std::size_t>(r)]);
            pr = std::clamp(pr, 1e-5, 1.0 - 1e-5);
            const double wr = pr * (1.0 - pr);
            w[static_cast<std::size_t>(r)] = wr;
            z[static_cast<std::size_t>(r)] =
                ((y_pos[static_cast<std::size_t>(r)] ? 1.0 : 0.0) - pr) / wr;
        }
        RegressionStump s = fit_regression_stump(X, w, z, order);
        s.left_value *= 0.5;
        s.right_value *= 0.5;
        for (int r = 0; r < n; ++r) {
            f_val[static_cast<std::size_t>(r)] +=
                X(r, s.feature) <= s.threshold ? s.left_value : s.right_value;
        }
        stages.push_back(s);
    }
    return stages;
}

}  // namespace

void LogitBoost::score_into(const double* x, double* out) const {
    const std::size_t k = classes_.size();
    if (k == 1) {
        out[0] = 1.0;
        return;
    }
    if (k == 2 && stages_.size() == 1) {
        const double pr = sigmoid2(eval_stages(stages_[0], x));
        out[0] = 1.0 - pr;
        out[1] = pr;
        return;
    }
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        out[c] = sigmoid2(eval_stages(stages_[c], x));
        total += out[c];
    }
    for (std::size_t c = 0; c < k; ++c) out[c] /= total;
}

nlohmann::json LogitBoost::to_json() const {
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& list : stages_) {
        nlohmann::json one = nlohmann::json::array();
        for (const auto& s : list)
            one.push_back({{"feature", s.feature},
                           {"threshold", s.threshold},
                           {"left_value", s.left_value},
                           {"right_value", s.right_value}});
        stages.push_back(std::move(one));
    }
    return {{"kind", kind()},
            {"classes", classes_},
            {"n_features", n_features_},
            {"stages", std::move(stages)}};
}

LogitBoost LogitBoost::from_json(const nlohmann::json& j) {
    std::vector<std::vector<RegressionStump>> stages;
    for (const auto& list : j.at("stages")) {
        std::vector<RegressionStump> one;
        for (const auto& s : list) {
            RegressionStump rs;
            rs.feature = s.at("feature");
            rs.threshold = s.at("threshold");
            rs.left_value = s.at("left_value");
            rs.right_value = s.at("right_value");
            one.push_back(rs);
        }
        stages.push_back(std::move(one));
    }
    return LogitBoost(j.at("n_features"), j.at("classes").get<std::vector<std::string>>(),
                      std::move(stages));
}

LogitBoost train_logitboost(const Matrix& X, const std::vector<int>& y,
                            const std::vector<std::string>& class_names, int rounds,
                            std::uint64_t seed) {
    (void)seed;
    if (rounds < 1) throw Error(ErrorCode::RoundsZero, "rounds must be >= 1");
    const int n = static_cast<int>(X.rows());
    if (n == 0) throw Error(ErrorCode::EmptyData, "no rows");

    const std::size_t k = class_names.size();
    std::vector<std::vector<RegressionStump>> stages;
    if (k >= 2) {
        const FeatureOrder order = FeatureOrder::build(X);
        std::vector<char> y_pos(static_cast<std::size_t>(n));
        if (k == 2) {
            for (int r = 0; r < n; ++r)
                y_pos[static_cast<std::size_t>(r)] = y[static_cast<std::size_t>(r)] == 1;
            stages.push_back(logitboost_binary(X, y_pos, rounds, order));
        } else {
            for (std::size_t c = 0; c < k; ++c) {
                for (int r = 0; r < n; ++r)
                    y_pos[static_cast<std::size_t>(r)] =
                        y[static_cast<std::size_t>(r)] == static_cast<int>(c);
                stages.push_back(logitboost_binary(X, y_pos, rounds, order));
            }
        }
    }
    return LogitBoost(static_cast<std::size_t>(X.cols()), class_names, std::move(stages));
}

}  // namespace xidps
