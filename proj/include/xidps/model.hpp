#ifndef XIDPS_MODEL_HPP
#define XIDPS_MODEL_HPP

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xidps/types.hpp"

namespace xidps {

// Shared prediction contract: every trained model maps an encoded row to a
// non-negative per-class score vector summing to 1, classes in training
// label order.
class Model {
public:
    virtual ~Model() = default;

    virtual std::string kind() const = 0;
    virtual std::size_t n_features() const = 0;

    const std::vector<std::string>& classes() const { return classes_; }
    std::size_t n_classes() const { return classes_.size(); }

    // primitive used by hot loops; out must hold n_classes() doubles
    virtual void score_into(const double* x, double* out) const = 0;

    virtual nlohmann::json to_json() const = 0;
    virtual std::unique_ptr<Model> clone() const = 0;

protected:
    std::vector<std::string> classes_;
};

Vector predict_scores(const Model& model, const Eigen::Ref<const Vector>& x);
int predict_index(const Model& model, const Eigen::Ref<const Vector>& x);
std::string predict_label(const Model& model, const Eigen::Ref<const Vector>& x);

// versioned JSON round-trip, dispatching on the kind tag
nlohmann::json model_to_json(const Model& model);
std::unique_ptr<Model> model_from_json(const nlohmann::json& j);

// Per-feature row orderings, computed once and shared by trainers that
// repeatedly scan sorted columns.
struct FeatureOrder {
    std::vector<std::vector<int>> by_feature;  // [feature] -> rows sorted by value

    static FeatureOrder build(const Matrix& X);
    static FeatureOrder build_subset(const Matrix& X, const std::vector<int>& features);
};

}  // namespace xidps

#endif  // XIDPS_MODEL_HPP
