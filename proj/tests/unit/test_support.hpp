#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "cmix/operator_core.hpp"
#include "cmix/random.hpp"

namespace cmix::test {

/// e^{X} through Eigen's Pade-based matrix exponential (independent of the
/// eigendecomposition route used by the library).
inline Matrix expm(const Matrix& x) { return x.exp(); }

/// U^n by explicit repeated multiplication.
inline Matrix naive_power(const Matrix& u, std::size_t n) {
  Matrix p = Matrix::Identity(u.rows(), u.cols());
  for (std::size_t k = 0; k < n; ++k) p = p * u;
  return p;
}

inline double spectral_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

}  // namespace cmix::test
