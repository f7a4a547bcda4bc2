#pragma once

// Skew products over torus translations x -> x + t y (mod 1).
//
// Abelian sectors (cocycle into T^{d'}, sector index q):
//   (U f)(x) = e^{2 pi i q.phi(x)} f(x + y),  phi(x) = B x + eta(x),
//   (U^N f)(x) = e^{2 pi i q.phi^{(N)}(x)} f(x + N y),
// conjugate operator A = -i y.grad, symbol 2 pi (y.(B^T q) + L_Y(q.eta)).
//
// SU(2) sectors: phi(x) = h diag(e^{2 pi i theta(x)}, e^{-2 pi i theta(x)}) h*,
// theta = b.x + eta, represented on degree-n homogeneous polynomials with
// the orthonormal monomial basis z1^k z2^{n-k} / sqrt(k!(n-k)!).

#include <cstddef>
#include <string>
#include <vector>

#include "cmix/commutator_engine.hpp"
#include "cmix/grid_field.hpp"
#include "cmix/mixing_analyzer.hpp"
#include "cmix/operator_core.hpp"

namespace cmix {

struct RationalProximity {
  double value = 0.0;
  std::vector<long> partial_quotients;
  long numerator = 0;     // best convergent with denominator <= max_denominator
  long denominator = 1;
  double distance = 0.0;  // |value - numerator / denominator|
  bool near_rational = false;
};

/// Continued-fraction expansion of v in (0,1) up to the given denominator.
RationalProximity rational_proximity(double v, long max_denominator = 10000,
                                     double near_tol = 1e-12);

class TorusFlow {
 public:
  explicit TorusFlow(std::vector<double> y, long max_denominator = 10000,
                     double near_tol = 1e-12);

  std::size_t dims() const { return y_.size(); }
  const Point& y() const { return y_; }
  const std::vector<RationalProximity>& proximity() const { return proximity_; }
  /// True when some component is within near_tol of a rational with small
  /// denominator. Irrationality cannot be certified; this is a warning.
  bool near_rational() const;

 private:
  Point y_;
  std::vector<RationalProximity> proximity_;
};

/// x + t y componentwise, reduced to [0, 1).
Point flow_step(const TorusFlow& flow, const Point& x, double t);

struct EtaTerm {
  Frequency frequency;
  Complex coeff;
  std::size_t component = 0;
};

class TorusCocycle {
 public:
  /// b is d' x d with integer entries, eta real-valued (Hermitian-symmetric
  /// coefficients), q in Z^{d'}.
  TorusCocycle(std::vector<std::vector<long>> b, std::vector<EtaTerm> eta, std::vector<long> q);

  std::size_t base_dims() const { return base_dims_; }
  std::size_t target_dims() const { return b_.size(); }
  const std::vector<std::vector<long>>& b() const { return b_; }
  const std::vector<EtaTerm>& eta() const { return eta_; }
  const std::vector<long>& q() const { return q_; }

  /// B^T q.
  const std::vector<long>& winding() const { return winding_; }
  /// q . eta as a scalar trigonometric polynomial.
  const TrigPolynomial& q_eta() const { return q_eta_; }
  /// Upper bound of sup |L_Y(q . eta)| (sum of coefficient moduli).
  double lyeta_sup(const TorusFlow& flow) const;

 private:
  std::vector<std::vector<long>> b_;
  std::vector<EtaTerm> eta_;
  std::vector<long> q_;
  std::size_t base_dims_ = 0;
  std::vector<long> winding_;
  TrigPolynomial q_eta_;
};

/// q . phi^{(n)}(x) as a real number, with x taken as a lifted (unreduced)
/// point: n >= 1 sums q.phi(x + k y) over k < n, n = 0 gives 0, and n < 0
/// gives -value(-n, x + n y).
double cocycle_sum(const TorusCocycle& c, const TorusFlow& flow, const Point& x, long n);

/// cocycle_sum reduced mod 1, computed without forming the large linear part.
double cocycle_phase(const TorusCocycle& c, const TorusFlow& flow, const Point& x, long n);

/// U^steps f in closed form, f spectrally interpolated. Throws ResolutionError
/// when f is not band-limited on its grid.
GridField sector_apply(const TorusCocycle& c, const TorusFlow& flow, const GridField& f,
                       long steps);

/// <f, U^n g> by trapezoidal quadrature on a grid fine enough to be exact for
/// the integrand's dominant frequencies. Throws ResolutionError when the grid
/// would exceed max_points.
Complex sector_correlation(const TorusCocycle& c, const TorusFlow& flow,
                           const TrigPolynomial& f, const TrigPolynomial& g, long n,
                           std::size_t max_points = std::size_t{1} << 22);

/// <f, U^N g> for N = 1..n_max.
CorrelationSeries sector_correlation_series(const TorusCocycle& c, const TorusFlow& flow,
                                            const TrigPolynomial& f, const TrigPolynomial& g,
                                            std::size_t n_max);

struct Case1Degree {
  std::size_t n = 0;
  GridField field;     // D_N on the grid
  double limit = 0.0;  // 2 pi y.(B^T q)
  double sup_error = 0.0;
  double lyeta_sup = 0.0;
};

Case1Degree case1_degree(const TorusCocycle& c, const TorusFlow& flow, const Shape& grid,
                         std::size_t n);

/// Truncation of (U, A) to the lattice: U = diag(e^{2 pi i q.phi(x_j)}) T_y with
/// T_y the spectral-interpolation shift, A the Fourier multiplier 2 pi k.y.
/// Both are exact (unitary, Hermitian) matrices. `symbol` is the exact
/// multiplication symbol 2 pi (y.(B^T q) + L_Y(q.eta)) sampled on the lattice.
struct TorusGridModel {
  Shape shape;
  Matrix u;
  Matrix a;
  Matrix symbol;
};

TorusGridModel torus_grid_model(const TorusCocycle& c, const TorusFlow& flow,
                                const Shape& shape);

// SU(2) ---------------------------------------------------------------------

/// Action P(z) -> P(g^T z) on degree-n homogeneous polynomials in the
/// orthonormal monomial basis. Throws StructureError unless g is in SU(2).
Matrix su2_irrep(std::size_t n, const Matrix& g);

bool is_special_unitary(const Matrix& g, double tol);

class SU2Cocycle {
 public:
  SU2Cocycle(Matrix h, std::vector<long> b, TrigPolynomial eta, std::size_t n);

  const Matrix& h() const { return h_; }
  const std::vector<long>& b() const { return b_; }
  const TrigPolynomial& eta() const { return eta_; }
  std::size_t n() const { return n_; }

  /// b.x + eta(x).
  double theta(const Point& x) const;
  /// phi(x) in SU(2).
  Matrix value(const Point& x) const;

 private:
  Matrix h_;
  std::vector<long> b_;
  TrigPolynomial eta_;
  std::size_t n_;
};

struct Case2Degree {
  std::size_t n = 0;
  MatrixField field;        // D_N(x)
  Matrix limit;             // lattice average of D_N
  RealVector eigenvalues;   // of limit, ascending
  RealVector expected;      // 2 pi (y.b)(2k - n), ascending
  double max_relative_error = 0.0;
  double sup_deviation = 0.0;  // max_x ||D_N(x) - limit||_max
  std::size_t kernel_dim = 0;
  double kernel_tol = 0.0;
};

/// D_N(x) = (1/N) sum_{m<N} pi(phi^{(m)}(x)) M(x + m y) pi(phi^{(m)}(x))*, with
/// M(x) = pi(h) diag(2 pi (2k-n)(y.b + L_Y eta(x))) pi(h)*.
Case2Degree case2_degree(const SU2Cocycle& c, const TorusFlow& flow, const Shape& grid,
                         std::size_t n, double kernel_tol = 1e-6);

// U(2) R-set ------------------------------------------------------------------

struct RMembership {
  bool member = false;
  double infimum = 0.0;
  long argmin_k = 0;
  double tol = 0.0;
};

/// min over k in {0..n} of |(2m-n)(b+ . y) + (2k-n)(b- . y)|, b+- = b1 +- b2.
RMembership case3_R_membership(long m, long n, const std::vector<long>& b1,
                               const std::vector<long>& b2, const Point& y,
                               double tol = 1e-12);

// Shift window ---------------------------------------------------------------

struct ShiftWeylModel {
  OperatorPair pair;
  std::size_t window = 0;
  std::size_t margin = 0;
  std::vector<std::size_t> interior;  // m <= k < window - m, m = max(margin, 1)
};

/// Cyclic shift U e_k = e_{k+1 mod n} and A = diag(k). [A,U]U^{-1} is the
/// identity on every row except the wrap row 0.
ShiftWeylModel shift_weyl_model(std::size_t window, std::size_t margin);

}  // namespace cmix
