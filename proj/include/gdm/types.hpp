#pragma once

#include <Eigen/Dense>

namespace gdm {

/// Row-major dense matrix; rows are points in the vocabulary simplex.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace gdm
