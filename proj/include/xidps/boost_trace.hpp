#ifndef XIDPS_BOOST_TRACE_HPP
#define XIDPS_BOOST_TRACE_HPP

#include <vector>

namespace xidps {

// Per-round diagnostics recorded during AdaBoost.M1 training.
struct BoostTrace {
    std::vector<double> epsilons;     // weighted error of each attempted round
    std::vector<double> alphas;       // vote weight of each accepted round
    std::vector<double> weight_sums;  // row-weight total after each accepted round
};

}  // namespace xidps

#endif  // XIDPS_BOOST_TRACE_HPP
