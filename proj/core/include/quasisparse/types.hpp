#pragma once

#include <Eigen/Core>

namespace quasisparse {

using DenseVector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

}  // namespace quasisparse
