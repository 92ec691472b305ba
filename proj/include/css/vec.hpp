#pragma once

#include <Eigen/Core>

namespace css {

using Vec = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace css
