#ifndef XIDPS_TYPES_HPP
#define XIDPS_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>

namespace xidps {

// Dense numeric core. Rows are instances, columns encoded features.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ConstRowRef = Eigen::Ref<const Eigen::RowVectorXd>;

}  // namespace xidps

#endif  // XIDPS_TYPES_HPP
