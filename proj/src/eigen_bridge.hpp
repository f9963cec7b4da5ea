#pragma once

#include <Eigen/Dense>

#include "daseinkit/linalg.hpp"

namespace daseinkit::detail {

using EigenMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::Map<const EigenMatrix> view(const ComplexMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.dim());
  return {m.data().data(), n, n};
}

inline ComplexMatrix from_eigen(const Eigen::MatrixXcd& e) {
  ComplexMatrix m(static_cast<std::size_t>(e.rows()));
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j)
      m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = e(i, j);
  return m;
}

}  // namespace daseinkit::detail
