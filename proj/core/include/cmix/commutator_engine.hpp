#pragma once

// Commutator symbols, Birkhoff averages of the symbols (D_N and D_t), the
// degree estimate with its convergence diagnostics, the exact commutator
// identities, the epsilon-regularised commutator and the mixing bound.
//
// Discrete case: U unitary, A Hermitian, symbol [A,U]U^{-1},
//   D_N = (1/N) sum_{n<N} U^n [A,U]U^{-1} U^{-n},  [A,U^N] = N D_N U^N.
// Continuous case: H, A Hermitian, symbol (H+i)^{-1}[iH,A](H-i)^{-1},
//   D_t = (1/t) int_0^t e^{isH} symbol e^{-isH} ds,  [A~,e^{-itH}] = t e^{-itH} D_t
// with A~ = (H+i)^{-1} A (H-i)^{-1}.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmix/operator_core.hpp"

namespace cmix {

enum class FlowKind { discrete, continuous };

const char* to_string(FlowKind kind);

/// (U, A) or (H, A). Both operators pass their structure checks on
/// construction.
class OperatorPair {
 public:
  static OperatorPair discrete(Matrix u, Matrix a, double tol = 1e-10);
  static OperatorPair continuous(Matrix h, Matrix a, double tol = 1e-10);

  const Matrix& main() const { return main_; }
  const Matrix& conjugate() const { return conjugate_; }
  FlowKind kind() const { return kind_; }
  Eigen::Index dim() const { return main_.rows(); }

 private:
  OperatorPair(Matrix main, Matrix conjugate, FlowKind kind)
      : main_(std::move(main)), conjugate_(std::move(conjugate)), kind_(kind) {}

  Matrix main_;
  Matrix conjugate_;
  FlowKind kind_;
};

/// (AU - UA)U*.
Matrix unitary_symbol(const OperatorPair& pair);
/// (H+i)^{-1} i(HA - AH) (H-i)^{-1}.
Matrix selfadjoint_symbol(const OperatorPair& pair);
/// Dispatches on pair.kind().
Matrix symbol(const OperatorPair& pair);
/// (H+i)^{-1} A (H-i)^{-1}.
Matrix tilde_conjugate(const OperatorPair& pair);

/// U^n by binary powering (independent of the incremental Birkhoff route).
Matrix matrix_power(const Matrix& u, std::size_t n);

/// (1/N) sum_{n<N} U^n M U^{-n}, conjugating incrementally.
Matrix birkhoff_discrete(const Matrix& u, const Matrix& m, std::size_t n);
/// All averages of a strictly increasing schedule in one incremental pass.
std::vector<Matrix> birkhoff_discrete_schedule(const Matrix& u, const Matrix& m,
                                               const std::vector<std::size_t>& schedule);

/// Adaptive composite Simpson with a Richardson error estimate per panel.
struct QuadratureRule {
  double abs_tol = 1e-11;       // on the integral over [0, t]
  double rel_tol = 1e-13;       // times t * ||M||
  std::size_t min_panels = 8;
  std::size_t max_nodes = std::size_t{1} << 20;
  int max_depth = 40;
};

struct ContinuousAverage {
  Matrix value;                   // D_t
  double integral_error = 0.0;    // estimated error of int_0^t, incl. roundoff floor
  double error_estimate = 0.0;    // integral_error / t
  double roundoff_floor = 0.0;
  std::size_t nodes = 0;
  std::size_t panels = 0;
};

/// (1/t) int_0^t e^{isH} M e^{-isH} ds. The propagators come from a single
/// eigendecomposition of H reused at every node. Throws QuadratureError when
/// the node budget is exhausted.
ContinuousAverage birkhoff_continuous(const Matrix& h, const Matrix& m, double t,
                                      const QuadratureRule& rule = {});
ContinuousAverage birkhoff_continuous(const SpectralDecomposition& h_dec, const Matrix& m,
                                      double t, const QuadratureRule& rule = {});

/// e^{-itH} from an eigendecomposition of H.
Matrix propagator(const SpectralDecomposition& h_dec, double t);

struct IdentityResidual {
  std::size_t n = 0;
  double residual = 0.0;        // ||[A,U^N] - N D_N U^N||, spectral norm
  double expected = 0.0;        // dim * 1e-12 * (||A|| + N ||D_N||)
  double bound = 0.0;           // 1e-9 (1 + ||A||)(1 + N)
  bool pass = false;            // residual <= bound
};

IdentityResidual degree_identity_check(const OperatorPair& pair, std::size_t n);

/// (1/N)[A,U^N]U^{-N}.
Matrix degree_alternative(const OperatorPair& pair, std::size_t n);

struct FlowIdentityResidual {
  double t = 0.0;
  double residual = 0.0;          // ||[A~,e^{-itH}] - t e^{-itH} D_t||, spectral norm
  double quadrature_error = 0.0;  // error estimate of t D_t
  bool pass = false;              // residual <= 10 * quadrature_error
};

FlowIdentityResidual flow_identity_check(const OperatorPair& pair, double t,
                                         const QuadratureRule& rule = {});

/// Cross-check of the unitary and self-adjoint pictures through H = cayley(U).
struct CayleyBridge {
  double roundtrip = 0.0;           // ||U - cayley^{-1}(cayley(U))||
  double resolvent_identity = 0.0;  // ||(H+i)^{-1} - (1-U)/(2i)||
  double symbol_gap = 0.0;          // ||selfadjoint_symbol(H,A) + 1/2 unitary_symbol(U,A)||
};

CayleyBridge cayley_bridge(const Matrix& u, const Matrix& a);

// Degree estimation ---------------------------------------------------------

struct DegreeOptions {
  /// Cauchy gaps on the last third of the schedule must stay below
  /// cauchy_threshold * max(1, ||limit||) for the estimate to count as settled.
  double cauchy_threshold = 1e-3;
  QuadratureRule quadrature;
  /// Measure probe residuals against this operator instead of the last average.
  std::optional<Matrix> reference;
  bool keep_averages = true;
};

struct QuadratureDiagnostics {
  double t = 0.0;
  double error_estimate = 0.0;
  std::size_t nodes = 0;
};

struct DegreeEstimate {
  FlowKind kind = FlowKind::discrete;
  std::vector<double> schedule;
  std::vector<Matrix> averages;  // empty unless keep_averages
  Matrix limit;
  std::vector<double> cauchy_gaps;                   // ||D_{k+1} - D_k||
  std::vector<std::vector<double>> probe_residuals;  // per probe, ||(D_k - limit) phi||
  std::vector<QuadratureDiagnostics> quadrature;     // continuous only
  double cauchy_threshold = 0.0;
  bool settled = false;    // last-third gaps below threshold
  bool diverging = false;  // not settled and last-third gaps not decreasing
  bool reference_used = false;
};

/// Schedule entries are N values (discrete, must be integers >= 1) or t values
/// (continuous, > 0), strictly increasing. Probes must be unit vectors.
DegreeEstimate estimate_degree(const OperatorPair& pair, const std::vector<double>& schedule,
                               const std::vector<Vector>& probes,
                               const DegreeOptions& options = {});

/// Same, with the symbol supplied directly (used when the symbol of a model is
/// known in closed form rather than through a truncated commutator).
DegreeEstimate estimate_degree_from_symbol(FlowKind kind, const Matrix& main,
                                           const Matrix& symbol_matrix,
                                           const std::vector<double>& schedule,
                                           const std::vector<Vector>& probes,
                                           const DegreeOptions& options = {});

nlohmann::json to_json(const DegreeEstimate& estimate);

// Regularised commutator ----------------------------------------------------

/// A_eps = (i eps)^{-1}(e^{i eps A} - 1).
Matrix regularized_conjugate(const Matrix& a, double eps);
/// [iS, A_eps].
Matrix epsilon_commutator(const Matrix& s, const Matrix& a, double eps);

struct EpsilonStudy {
  std::vector<double> eps;
  std::vector<double> errors;  // ||[iS,A_eps] - [iS,A]||
  double slope = 0.0;          // log-log least squares
};

EpsilonStudy epsilon_convergence(const Matrix& s, const Matrix& a,
                                 const std::vector<double>& eps_values);

// Mixing bound --------------------------------------------------------------

/// Polynomial-smoothstep bump on [a, b] with 0 outside the closed interval
/// [a, b] (which must not contain 0). It rises over the first `ramp` fraction
/// of the support, is 1 on the plateau, and falls over the last fraction.
class SmoothWindow {
 public:
  SmoothWindow(double a, double b, int order = 5, double ramp = 0.25);

  double operator()(double x) const;
  bool on_plateau(double x) const { return x >= plateau_lo() && x <= plateau_hi(); }

  double a() const { return a_; }
  double b() const { return b_; }
  int order() const { return order_; }
  double ramp() const { return ramp_; }
  double plateau_lo() const { return a_ + ramp_ * (b_ - a_); }
  double plateau_hi() const { return b_ - ramp_ * (b_ - a_); }

 private:
  double a_, b_;
  int order_;
  double ramp_;
};

/// Generalised smoothstep of odd polynomial degree `order`, clamped to [0,1].
double smoothstep(double x, int order);

struct MixingBound {
  std::size_t n = 0;
  double lhs = 0.0;  // |<phi, U^N psi>|
  double rhs = 0.0;
  double limit_term = 0.0;  // ||(D_N - D) D^{-1} eta(D) phi|| ||psi||
  double a_phi_term = 0.0;  // (1/N) ||A D^{-1} eta(D) phi|| ||psi||
  double a_psi_term = 0.0;  // (1/N) ||D^{-1} eta(D) phi|| ||A psi||
  bool holds = false;       // lhs <= rhs + 1e-9
};

/// Evaluates both sides of the bound for <phi, U^N psi>. phi must satisfy
/// eta(D) phi = phi (project first, e.g. with plateau_projector).
MixingBound mixing_bound(const OperatorPair& pair, const Matrix& d, const SmoothWindow& window,
                         const Vector& phi, const Vector& psi, std::size_t n);

/// Spectral projector of D onto the plateau of the window.
Matrix plateau_projector(const Matrix& d, const SmoothWindow& window);

}  // namespace cmix
