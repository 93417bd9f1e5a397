#pragma once

#include <Eigen/Dense>

namespace sdnf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

} // namespace sdnf
