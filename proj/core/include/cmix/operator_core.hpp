#pragma once

// Dense complex-matrix foundation: structure checks, spectral decomposition of
// normal matrices, functional calculus, spectral/kernel projectors and the
// Cayley transform between unitary and self-adjoint operators.
//
// Everything here is a pure function of its arguments. Finite truncations of
// the operators U, A, H, D, K live in `Matrix`.

#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cmix {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

enum class StructureKind { unitary, hermitian };

struct StructureReport {
  bool pass = false;
  double deviation = 0.0;  // max-norm of S*S - I or S - S*
};

/// Max-norm (largest entry modulus) deviation from unitarity or hermiticity.
StructureReport check_structure(const Matrix& s, StructureKind kind, double tol);

void require_square(const Matrix& s, const char* what);
void require_same_dim(const Matrix& a, const Matrix& b, const char* what);

double max_norm(const Matrix& m);
/// Spectral norm (largest singular value).
double op_norm(const Matrix& m);

Matrix commutator(const Matrix& a, const Matrix& b);
Matrix hermitian_part(const Matrix& m);
Matrix identity_like(const Matrix& m);

/// (S - z)^{-1} by LU; S is expected not to have z in its spectrum.
Matrix resolvent(const Matrix& s, Complex z);

struct SpectralDecomposition {
  Vector eigenvalues;      // real for Hermitian input
  Matrix eigenvectors;     // unitary, columns paired with eigenvalues
  double residual = 0.0;   // max_j ||S v_j - lambda_j v_j||
  bool hermitian = false;

  std::size_t dim() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

/// Eigendecomposition of a normal matrix. Hermitian input goes through the
/// self-adjoint solver; otherwise the complex Schur form is used, which keeps
/// the eigenvector basis unitary under degeneracy. Throws StructureError when
/// ||SS* - S*S|| exceeds normal_tol * max(1, ||S||^2).
SpectralDecomposition decompose(const Matrix& s, double normal_tol = 1e-8);

using ScalarFunction = std::function<Complex(Complex)>;

/// V g(Lambda) V*. Throws EvaluationError if g is non-finite at an eigenvalue.
Matrix functional_calculus(const SpectralDecomposition& dec, const ScalarFunction& g);
Matrix functional_calculus(const Matrix& s, const ScalarFunction& g, double normal_tol = 1e-8);

struct Warning {
  std::string message;
  Complex value;  // offending eigenvalue
};

/// A Borel-set predicate on the spectrum, together with the distance of a
/// point to the set's boundary (used to flag ambiguous spectral cuts).
class SpectralSet {
 public:
  using Predicate = std::function<bool(Complex)>;
  using Distance = std::function<double(Complex)>;

  SpectralSet(Predicate contains, Distance boundary_distance, std::string label);

  static SpectralSet everything();
  /// R \ {point}, evaluated on the real part.
  static SpectralSet real_line_without(double point);
  /// Open interval (a, b) of the real axis; a or b may be infinite.
  static SpectralSet open_interval(double a, double b);
  static SpectralSet positive();
  /// Closed arc {e^{i theta} : |theta - center| <= half_width} of the circle.
  static SpectralSet circle_arc(double center, double half_width);

  SpectralSet complement() const;

  bool contains(Complex z) const { return contains_(z); }
  double boundary_distance(Complex z) const { return distance_(z); }
  const std::string& label() const { return label_; }

 private:
  Predicate contains_;
  Distance distance_;
  std::string label_;
};

struct SpectralProjection {
  Matrix projector;
  std::size_t rank = 0;
  std::vector<Warning> warnings;
};

SpectralProjection spectral_projector(const Matrix& s, const SpectralSet& set, double tol);
SpectralProjection spectral_projector(const SpectralDecomposition& dec, const SpectralSet& set,
                                      double tol);

/// ker(D) + ker(D)^perp for Hermitian D. Eigenvalues with |lambda| <= tol*||D||
/// (spectral norm) count as kernel.
struct KernelSplit {
  double tol = 0.0;
  double threshold = 0.0;  // tol * ||D||
  Matrix kernel_projector;
  Matrix perp_projector;
  Matrix kernel_basis;  // orthonormal columns
  Matrix perp_basis;
  std::size_t kernel_dim = 0;
  RealVector eigenvalues;
  std::vector<Warning> warnings;
};

/// An eigenvalue inside [threshold / margin, threshold * margin] is reported
/// as ambiguous. Throws StructureError for non-Hermitian D.
KernelSplit kernel_split(const Matrix& d, double tol, double margin = 10.0);

/// H = i(1 + U)(1 - U)^{-1}. Throws SingularityError carrying the eigenvalue
/// of U closest to 1 when that distance is <= singular_tol.
Matrix cayley_transform(const Matrix& u, double singular_tol = 1e-6);
/// U = (H + i)^{-1}(H - i).
Matrix inverse_cayley_transform(const Matrix& h);

}  // namespace cmix
