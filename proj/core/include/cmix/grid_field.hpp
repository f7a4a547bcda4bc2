#pragma once

// Samples of functions on the torus T^d on a uniform power-of-two lattice,
// with FFT-based spectral interpolation, shifts and directional derivatives.
// Trigonometric polynomials are kept separately so that they can be
// evaluated exactly off the lattice.

#include <cstddef>
#include <functional>
#include <map>
#include <vector>

#include "cmix/operator_core.hpp"

namespace cmix {

using Shape = std::vector<std::size_t>;
using Point = std::vector<double>;

class GridField {
 public:
  GridField() = default;
  explicit GridField(Shape shape);
  GridField(Shape shape, std::vector<Complex> values);

  static GridField sample(const Shape& shape, const std::function<Complex(const Point&)>& f);

  const Shape& shape() const { return shape_; }
  std::size_t dims() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }

  /// Lattice point j / n per axis, row-major flat index.
  Point point(std::size_t flat) const;

  Complex& operator[](std::size_t i) { return values_[i]; }
  const Complex& operator[](std::size_t i) const { return values_[i]; }
  const std::vector<Complex>& values() const { return values_; }

  double sup_norm() const;
  Complex mean() const;

 private:
  Shape shape_;
  std::vector<Complex> values_;
};

/// Matrix-valued samples, all of the same square shape.
struct MatrixField {
  Shape shape;
  std::vector<Matrix> values;

  std::size_t size() const { return values.size(); }
  Point point(std::size_t flat) const;
};

std::size_t flat_size(const Shape& shape);
void validate_shape(const Shape& shape);

/// Index in [0, n) to the signed frequency in [-n/2, n/2).
long signed_frequency(std::size_t index, std::size_t n);

/// Fourier coefficients c_k with f(x) = sum_k c_k e^{2 pi i k.x}, stored in
/// FFT order per axis.
std::vector<Complex> forward_coefficients(const GridField& f);
GridField from_coefficients(const Shape& shape, std::vector<Complex> coefficients);

/// Relative energy in modes with |k_a| >= 3 n_a / 8 on some axis.
double outer_band_energy(const GridField& f);

/// Throws ResolutionError when outer_band_energy(f) > tol.
void require_band_limited(const GridField& f, const char* what, double tol = 1e-20);

/// x -> f(x + s), by phase rotation of the coefficients.
GridField shifted(const GridField& f, const Point& s);

/// y . grad f, spectrally.
GridField directional_derivative(const GridField& f, const Point& y);

/// Mean of conj(f) g over the lattice (exact for band-limited products).
Complex inner(const GridField& f, const GridField& g);

// Trigonometric polynomials ------------------------------------------------

using Frequency = std::vector<int>;

struct FourierTerm {
  Frequency frequency;
  Complex coeff;
};

class TrigPolynomial {
 public:
  TrigPolynomial() = default;
  TrigPolynomial(std::size_t dims, const std::vector<FourierTerm>& terms);

  std::size_t dims() const { return dims_; }
  const std::map<Frequency, Complex>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  Complex operator()(const Point& x) const;
  /// y . grad, exactly.
  TrigPolynomial derivative(const Point& y) const;
  GridField sampled(const Shape& shape) const;

  /// max_k |k|_inf.
  int bandwidth() const;
  /// sum |c_k|^2 = ||p||^2 in L^2(T^d).
  double l2_norm_sq() const;
  /// sum |c_k|, an upper bound of the sup norm.
  double coefficient_l1() const;
  /// Largest |c_k - conj(c_{-k})|; zero for real-valued polynomials.
  double hermitian_defect() const;

 private:
  std::size_t dims_ = 0;
  std::map<Frequency, Complex> terms_;
};

}  // namespace cmix
