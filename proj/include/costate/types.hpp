#pragma once

#include <Eigen/Dense>

namespace costate {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

} // namespace costate
