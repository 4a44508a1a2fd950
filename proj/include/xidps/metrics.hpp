#ifndef XIDPS_METRICS_HPP
#define XIDPS_METRICS_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace xidps {

// Square count matrix indexed (true class, predicted class). The class at
// normal_index acts as the negative class of the derived binary view; every
// other class counts as positive (attack).
struct ConfusionMatrix {
    std::vector<std::string> classes;
    Eigen::MatrixXi counts;
    int normal_index = 0;

    explicit ConfusionMatrix(std::vector<std::string> class_names, int normal = 0)
        : classes(std::move(class_names)), normal_index(normal) {
        counts = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(classes.size()),
                                       static_cast<Eigen::Index>(classes.size()));
    }

    void add(int true_class, int predicted_class) { ++counts(true_class, predicted_class); }

    long total() const { return counts.sum(); }

    struct Binary {
        long tp = 0, tn = 0, fp = 0, fn = 0;
    };
    Binary binary() const;
};

// multi-class accuracy: trace / total
double accuracy(const ConfusionMatrix& cm);

// (TP+TN) / (TP+TN+FP+FN) over the binary anomaly view
double binary_accuracy(const ConfusionMatrix& cm);

}  // namespace xidps

#endif  // XIDPS_METRICS_HPP
