#include "xidps/metrics.hpp"

#include "xidps/errors.hpp"

namespace xidps {

ConfusionMatrix::Binary ConfusionMatrix::binary() const {
    Binary b;
    const auto n = counts.rows();
    for (Eigen::Index t = 0; t < n; ++t) {
        for (Eigen::Index p = 0; p < n; ++p) {
            const long c = counts(t, p);
            const bool true_attack = t != normal_index;
            const bool pred_attack = p != normal_index;
            if (true_attack && pred_attack) b.tp += c;
            else if (!true_attack && !pred_attack) b.tn += c;
            else if (!true_attack && pred_attack) b.fp += c;
            else b.fn += c;
        }
    }
    return b;
}

double accuracy(const ConfusionMatrix& cm) {
    const long total = cm.total();
    if (total == 0) throw Error(ErrorCode::EmptyMatrix, "confusion matrix has no counts");
    return static_cast<double>(cm.counts.trace()) / static_cast<double>(total);
}

double binary_accuracy(const ConfusionMatrix& cm) {
    const long total = cm.total();
    if (total == 0) throw Error(ErrorCode::EmptyMatrix, "confusion matrix has no counts");
    const auto b = cm.binary();
    return static_cast<double>(b.tp + b.tn) / static_cast<double>(b.tp + b.tn + b.fp + b.fn);
}

}  // namespace xidps
