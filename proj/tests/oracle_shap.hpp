#ifndef XIDPS_ORACLE_SHAP_HPP
#define XIDPS_ORACLE_SHAP_HPP

// Independent brute-force Shapley enumerator, written the naive textbook
// way: explicit subset lists, coalition values recomputed from scratch for
// every term, factorials by plain multiplication. Deliberately shares no
// code with the library implementation it checks.

#include <vector>

#include "xidps/model.hpp"
#include "xidps/shapley.hpp"
#include "xidps/types.hpp"

namespace xidps::test {

inline double oracle_factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// mean model output over the background with coalition features (plus all
// features outside the explained subset) taken from the instance
inline double oracle_value(const Model& model, const ExplainTarget& target,
                           const Vector& x, const Matrix& background,
                           const std::vector<int>& subset, const std::vector<int>& coalition) {
    std::vector<double> scratch(model.n_classes());
    double total = 0.0;
    for (Eigen::Index b = 0; b < background.rows(); ++b) {
        Vector z = x;
        for (int f : subset) {
            bool in_coalition = false;
            for (int g : coalition)
                if (g == f) in_coalition = true;
            if (!in_coalition) z[f] = background(b, f);
        }
        total += eval_target(model, target, z.data(), scratch.data());
    }
    return total / static_cast<double>(background.rows());
}

inline std::vector<std::vector<int>> oracle_subsets_without(const std::vector<int>& subset,
                                                            int excluded) {
    std::vector<int> rest;
    for (int f : subset)
        if (f != excluded) rest.push_back(f);
    std::vector<std::vector<int>> out = {{}};
    for (int f : rest) {
        const std::size_t n = out.size();
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<int> with = out[i];
            with.push_back(f);
            out.push_back(std::move(with));
        }
    }
    return out;
}

inline Vector oracle_shap(const Model& model, const ExplainTarget& target, const Vector& x,
                          const Matrix& background, const std::vector<int>& subset) {
    const int m = static_cast<int>(subset.size());
    Vector phi = Vector::Zero(x.size());
    for (int f : subset) {
        double total = 0.0;
        for (const auto& coalition : oracle_subsets_without(subset, f)) {
            const int s = static_cast<int>(coalition.size());
            const double weight = oracle_factorial(s) * oracle_factorial(m - s - 1) /
                                  oracle_factorial(m);
            std::vector<int> with = coalition;
            with.push_back(f);
            total += weight * (oracle_value(model, target, x, background, subset, with) -
                               oracle_value(model, target, x, background, subset, coalition));
        }
        phi[f] = total;
    }
    return phi;
}

}  // namespace xidps::test

#endif  // XIDPS_ORACLE_SHAP_HPP
