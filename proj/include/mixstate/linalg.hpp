#pragma once

#include <Eigen/Core>

namespace mixstate {

// Every implemented family has dimension <= 3, so the natural-parameter
// vectors and interaction matrices never touch the heap.
inline constexpr int kMaxDim = 3;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

}  // namespace mixstate
