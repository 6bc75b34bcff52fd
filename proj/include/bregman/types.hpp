#pragma once

#include <Eigen/Dense>

namespace bregman {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace bregman
