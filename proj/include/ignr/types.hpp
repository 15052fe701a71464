#pragma once

#include <Eigen/Dense>

namespace ignr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
// Learnable weights are stored row-major so that data() matches the
// checkpoint layout.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace ignr
