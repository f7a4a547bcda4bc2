#include "cmix/random.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/QR>

#include "cmix/errors.hpp"

namespace cmix {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(phi);
  has_spare_ = true;
  return r * std::cos(phi);
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

namespace {

Matrix ginibre(Eigen::Index dim, Rng& rng) {
  Matrix g(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) g(r, c) = rng.complex_normal();
  }
  return g;
}

}  // namespace

Matrix random_unitary(Eigen::Index dim, Rng& rng) {
  if (dim <= 0) throw ArgumentError("random_unitary: dim must be positive");
  const Matrix g = ginibre(dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Complex d = r(k, k);
    const double a = std::abs(d);
    if (a > 0.0) q.col(k) *= d / a;
  }
  return q;
}

Matrix random_hermitian(Eigen::Index dim, Rng& rng, double scale) {
  if (dim <= 0) throw ArgumentError("random_hermitian: dim must be positive");
  const Matrix g = ginibre(dim, rng);
  return (scale / std::sqrt(2.0 * static_cast<double>(dim))) * (g + g.adjoint());
}

Matrix random_unitary_away_from_one(Eigen::Index dim, Rng& rng, double gap) {
  if (!(gap > 0.0 && gap < 2.0)) throw ArgumentError("random_unitary_away_from_one: gap in (0,2)");
  // |e^{i theta} - 1| = 2 sin(theta / 2) >= gap
  const double theta_min = 2.0 * std::asin(gap / 2.0);
  const double theta_max = 2.0 * std::numbers::pi - theta_min;
  const Matrix v = random_unitary(dim, rng);
  Vector phases(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    phases(k) = std::polar(1.0, rng.uniform(theta_min, theta_max));
  }
  return v * phases.asDiagonal() * v.adjoint();
}

Vector random_unit_vector(Eigen::Index dim, Rng& rng) {
  if (dim <= 0) throw ArgumentError("random_unit_vector: dim must be positive");
  Vector v(dim);
  for (Eigen::Index k = 0; k < dim; ++k) v(k) = rng.complex_normal();
  return v / v.norm();
}

}  // namespace cmix
