#pragma once

#include <Eigen/Dense>

namespace finsler {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// A tangent vector together with its base point.
struct TangentVec {
  Vec base;
  Vec v;
};

// A covector (element of T*_x M) together with its base point.
struct Covec {
  Vec base;
  Vec xi;
};

}  // namespace finsler
