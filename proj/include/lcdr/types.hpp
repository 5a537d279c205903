#pragma once

#include <Eigen/Dense>

namespace lcdr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace lcdr
