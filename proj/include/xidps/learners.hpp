#ifndef XIDPS_LEARNERS_HPP
#define XIDPS_LEARNERS_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "xidps/model.hpp"
#include "xidps/types.hpp"

namespace xidps {

// ---------------------------------------------------------------------------
// Decision stump: one threshold, one class-vote distribution per side.
// Rows with x[feature] <= threshold take the left votes.
class Stump : public Model {
public:
    Stump() = default;
    Stump(std::size_t n_features, std::vector<std::string> classes, int feature, double threshold,
          Vector left_votes, Vector right_votes);

    std::string kind() const override { return "stump"; }
    std::size_t n_features() const override { return n_features_; }
    void score_into(const double* x, double* out) const override;
    nlohmann::json to_json() const override;
    std::unique_ptr<Model> clone() const override { return std::make_unique<Stump>(*this); }
    static Stump from_json(const nlohmann::json& j);

    int feature() const { return feature_; }
    double threshold() const { return threshold_; }
    const Vector& left_votes() const { return left_votes_; }
    const Vector& right_votes() const { return right_votes_; }

private:
    std::size_t n_features_ = 0;
    int feature_ = 0;
    double threshold_ = 0.0;
    Vector left_votes_, right_votes_;
};

// Minimizes weighted misclassification over all (feature, midpoint)
// candidates; ties resolved by lowest feature index then lowest threshold.
Stump train_stump(const Matrix& X, const std::vector<int>& y, const std::vector<double>& w,
                  const std::vector<std::string>& class_names,
                  const FeatureOrder* order = nullptr);

// ---------------------------------------------------------------------------
// Depth-limited decision tree with Gini impurity splits, midpoint
// thresholds, minimum leaf size 2.
class Tree : public Model {
public:
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1, right = -1;
        Vector dist;  // leaf distribution
    };

    Tree() = default;
    Tree(std::size_t n_features, std::vector<std::string> classes, std::vector<Node> nodes,
         int max_depth);

    std::string kind() const override { return "tree"; }
    std::size_t n_features() const override { return n_features_; }
    void score_into(const double* x, double* out) const override;
    nlohmann::json to_json() const override;
    std::unique_ptr<Model> clone() const override { return std::make_unique<Tree>(*this); }
    static Tree from_json(const nlohmann::json& j);

    const std::vector<Node>& nodes() const { return nodes_; }
    int max_depth() const { return max_depth_; }
    int depth() const;

private:
    std::size_t n_features_ = 0;
    std::vector<Node> nodes_;  // nodes_[0] is the root
    int max_depth_ = 0;
};

struct TreeOptions {
    int max_depth = 8;
    int min_leaf = 2;
};

Tree train_tree(const Matrix& X, const std::vector<int>& y,
                const std::vector<std::string>& class_names, const TreeOptions& opts = {},
                const std::vector<int>* feature_subset = nullptr);

// ---------------------------------------------------------------------------
// AdaBoost.M1 over decision stumps. Per-round epsilon/alpha are retained so
// the boosting contract stays inspectable.
class AdaBoost : public Model {
public:
    AdaBoost() = default;
    AdaBoost(std::size_t n_features, std::vector<std::string> classes, std::vector<Stump> members,
             std::vector<double> alphas, std::vector<double> epsilons);

    std::string kind() const override { return "adaboost_m1"; }
    std::size_t n_features() const override { return n_features_; }
    void score_into(const double* x, double* out) const override;
    nlohmann::json to_json() const override;
    std::unique_ptr<Model> clone() const override { return std::make_unique<AdaBoost>(*this); }
    static AdaBoost from_json(const nlohmann::json& j);

    const std::vector<Stump>& members() const { return members_; }
    const std::vector<double>& alphas() const { return alphas_; }
    const std::vector<double>& epsilons() const { return epsilons_; }

private:
    std::size_t n_features_ = 0;
    std::vector<Stump> members_;
    std::vector<double> alphas_;
    std::vector<double> epsilons_;
};

struct BoostTrace;

AdaBoost train_adaboost_m1(const Matrix& X, const std::vector<int>& y,
                           const std::vector<std::string>& class_names, int rounds,
                           std::uint64_t seed = 0);

// variant that records per-round epsilon/alpha/weight-sum diagnostics
AdaBoost train_adaboost_m1(const Matrix& X, const std::vector<int>& y,
                           const std::vector<std::string>& class_names, int rounds,
                           std::uint64_t seed, BoostTrace* trace);

// ---------------------------------------------------------------------------
// LogitBoost with regression stumps on working responses; multi-class via
// one-vs-rest with score normalization.
struct RegressionStump {
    int feature = 0;
    double threshold = 0.0;
    double left_value = 0.0;  // additive contribution, halving folded in
    double right_value = 0.0;
};

class LogitBoost : public Model {
public:
    LogitBoost() = default;
    LogitBoost(std::size_t n_features, std::vector<std::string> classes,
               std::vector<std::vector<RegressionStump>> stages);

    std::string kind() const override { return "logitboost_ovr"; }
    std::size_t n_features() const override { return n_features_; }
    void score_into(const double* x, double* out) const override;
    nlohmann::json to_json() const override;
    std::unique_ptr<Model> clone() const override { return std::make_unique<LogitBoost>(*this); }
    static LogitBoost from_json(const nlohmann::json& j);

    const std::vector<std::vector<RegressionStump>>& stages() const { return stages_; }

private:
    std::size_t n_features_ = 0;
    // stages_[c] is the additive model of the one-vs-rest problem for class
    // c; for a plain binary problem there is a single entry for class 1.
    std::vector<std::vector<RegressionStump>> stages_;
};

LogitBoost train_logitboost(const Matrix& X, const std::vector<int>& y,
                            const std::vector<std::string>& class_names, int rounds,
                            std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Decision table over a greedily selected feature subset; numeric features
// binned by equal frequency. Lookups that miss return the majority
// distribution.
class DecisionTable : public Model {
public:
    DecisionTable() = default;
    DecisionTable(std::size_t n_features, std::vector<std::string> classes,
                  std::vector<int> features, std::vector<std::vector<double>> bin_edges,
                  std::vector<std::pair<std::uint64_t, Vector>> cells, Vector default_dist);

    std::string kind() const override { return "decision_table"; }
    std::size_t n_features() const override { return n_features_; }
    void score_into(const double* x, double* out) const override;
    nlohmann::json to_json() const override;
    std::unique_ptr<Model> clone() const override { return std::make_unique<DecisionTable>(*this); }
    static DecisionTable from_json(const nlohmann::json& j);

    const std::vector<int>& features() const { return features_; }
    const std::vector<std::vector<double>>& bin_edges() const { return bin_edges_; }
    std::size_t n_cells() const { return cell_keys_.size(); }
    const Vector& default_dist() const { return default_dist_; }

    std::uint64_t key_of(const double* x) const;

private:
    std::size_t n_features_ = 0;
    std::vector<int> features_;
    std::vector<std::vector<double>> bin_edges_;  // per selected feature, strictly increasing
    std::vector<std::uint64_t> cell_keys_;
    std::vector<Vector> cell_dists_;
    Vector default_dist_;

    friend DecisionTable train_decision_table(const Matrix&, const std::vector<int>&,
                                              const std::vector<std::string>&, int, int);
};

DecisionTable train_decision_table(const Matrix& X, const std::vector<int>& y,
                                   const std::vector<std::string>& class_names,
                                   int max_features = 8, int bins = 10);

// ---------------------------------------------------------------------------
// Random subspace ensemble of depth-limited trees, each trained on a
// seed-deterministic feature subset of size ceil(fraction * p).
class RandomSubspace : public Model {
public:
    RandomSubspace() = default;
    RandomSubspace(std::size_t n_features, std::vector<std::string> classes,
                   std::vector<Tree> trees, std::vector<std::vector<int>> subsets,
                   double fraction, std::uint64_t seed);

    std::string kind() const override { return "random_subspace"; }
    std::size_t n_features() const override { return n_features_; }
    void score_into(const double* x, double* out) const override;
    nlohmann::json to_json() const override;
    std::unique_ptr<Model> clone() const override {
        return std::make_unique<RandomSubspace>(*this);
    }
    static RandomSubspace from_json(const nlohmann::json& j);

    const std::vector<Tree>& trees() const { return trees_; }
    const std::vector<std::vector<int>>& subsets() const { return subsets_; }

private:
    std::size_t n_features_ = 0;
    std::vector<Tree> trees_;
    std::vector<std::vector<int>> subsets_;
    double fraction_ = 0.5;
    std::uint64_t seed_ = 0;
};

struct SubspaceOptions {
    int members = 30;
    double fraction = 0.5;
    int depth = 8;
};

RandomSubspace train_random_subspace(const Matrix& X, const std::vector<int>& y,
                                     const std::vector<std::string>& class_names,
                                     const SubspaceOptions& opts, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Model factory keyed by the names the CLI exposes.
struct Hyperparams {
    int boost_rounds = 50;
    int subspace_members = 30;
    double subspace_fraction = 0.5;
    int tree_depth = 8;
    int table_max_features = 8;
    int table_bins = 10;
};

const std::vector<std::string>& model_names();

std::unique_ptr<Model> train_model(const std::string& name, const Matrix& X,
                                   const std::vector<int>& y,
                                   const std::vector<std::string>& class_names,
                                   const Hyperparams& hp, std::uint64_t seed);

}  // namespace xidps

#endif  // XIDPS_LEARNERS_HPP
