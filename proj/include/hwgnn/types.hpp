#pragma once

#include <Eigen/Core>

namespace hwgnn {

// Row-major so node-feature rows are contiguous for the sparse kernels.
template <class S>
using MatT = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class S>
using VecT = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using Mat = MatT<double>;
using Vec = VecT<double>;

}  // namespace hwgnn
