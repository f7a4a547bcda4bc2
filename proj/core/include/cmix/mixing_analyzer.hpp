#pragma once

// Correlation sequences <phi, U^N psi> and <phi, e^{-itH} psi>, decay and
// square-summability diagnostics, eigen-reports inside ker(D)^perp, and the
// Fourier-series functional calculus g(U) = sum_n c_n U^n.
//
// Every threshold used here is a reporting convention with a documented
// default; the reports carry the value that produced each flag.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmix/commutator_engine.hpp"
#include "cmix/operator_core.hpp"

namespace cmix {

inline constexpr int kSeriesCsvVersion = 1;

struct CorrelationSeries {
  FlowKind kind = FlowKind::discrete;
  std::vector<double> abscissae;  // N = 1..N_max or the supplied times
  std::vector<Complex> values;
  std::vector<double> partial_l2;  // running sum |c|^2, or trapezoid int |c|^2 dt

  std::size_t size() const { return values.size(); }

  /// Builds a series from raw samples, filling partial_l2.
  static CorrelationSeries from_values(FlowKind kind, std::vector<double> abscissae,
                                       std::vector<Complex> values);
};

/// c_N = <phi, U^N psi> for N = 1..n_max, by repeated application psi <- U psi.
CorrelationSeries correlation_discrete(const Matrix& u, const Vector& phi, const Vector& psi,
                                       std::size_t n_max);

/// c_t = sum_j e^{-it l_j} <phi, v_j><v_j, psi> from the eigendecomposition of H.
CorrelationSeries correlation_continuous(const Matrix& h, const Vector& phi, const Vector& psi,
                                         const std::vector<double>& times);

struct SummabilityOptions {
  /// Saturating iff the last third of the increments adds up to less than
  /// this fraction of the running total.
  double saturation_fraction = 1e-3;
  /// Increments whose log-log tail slope exceeds this are flagged as
  /// non-decaying (linear growth of the partial sums).
  double growth_slope = -0.5;
};

struct SummabilityReport {
  bool saturating = false;
  bool linear_growth = false;
  double tail_slope = 0.0;          // log-log slope of increments over the tail
  double total = 0.0;               // partial_l2 at the horizon
  double tail_fraction = 0.0;       // last-third increments / total
  double extrapolated_total = 0.0;  // +inf when the fitted tail is not summable
  SummabilityOptions options;
};

/// Requires at least 16 samples.
SummabilityReport summability_report(const CorrelationSeries& series,
                                     const SummabilityOptions& options = {});

struct DecayReport {
  bool decayed = false;
  double early_max = 0.0;  // max |c| over the first quarter
  double late_max = 0.0;   // max |c| over the last quarter
  double fraction = 0.1;
};

/// Decay detected iff late_max < fraction * early_max.
DecayReport decay_report(const CorrelationSeries& series, double fraction = 0.1);

struct PerpEigenpair {
  Complex eigenvalue;
  double residual = 0.0;  // ||op_full v - lambda v||
};

struct PerpEigenReport {
  std::vector<PerpEigenpair> pairs;  // sorted by residual, ascending
  double min_residual = 0.0;         // +inf for an empty perp sector
  std::size_t perp_dim = 0;
};

using OperatorAction = std::function<double(const Vector& v, Complex lambda)>;

/// Eigenpairs of the compression of `op` to ker(D)^perp. Each residual is
/// measured with `full_residual` (defaults to the truncated operator itself).
/// A finite truncation always has point spectrum, so the informative quantity
/// is how these residuals behave as the truncation grows.
PerpEigenReport eigen_in_perp(const Matrix& op, const KernelSplit& split,
                              const OperatorAction& full_residual = {});

// Fourier-series functional calculus ----------------------------------------

using CircleFunction = std::function<Complex(Complex)>;

struct FourierOptions {
  std::size_t grid = 0;  // 0 selects 8 * n_max (rounded up to a power of two)
  /// Relative energy allowed in |n| >= 3 grid / 8 before the sampling is
  /// declared unresolved.
  double aliasing_threshold = 1e-12;
  std::size_t fit_min = 8;  // fit range starts here
};

struct FourierCalculus {
  std::size_t n_max = 0;
  std::vector<Complex> coefficients;  // index n + n_max, n in [-n_max, n_max]
  double fit_constant = 0.0;          // C in |c_n| ~ C (1+|n|)^exponent
  double fit_exponent = 0.0;
  double gamma = 0.0;
  double declared_constant = 0.0;     // max |c_n| (1+|n|)^{2+gamma}
  double tail_bound = 0.0;            // declared_constant * sum_{|n|>n_max} (1+|n|)^{-(2+gamma)}
  double reconstruction_error = 0.0;  // ||sum c_n U^n - g(U)||_max
  double nyquist_energy = 0.0;
  std::size_t grid = 0;

  Complex coefficient(long n) const {
    return coefficients.at(static_cast<std::size_t>(n + static_cast<long>(n_max)));
  }
};

/// Coefficients of g on the circle by FFT; reconstruction by the matrix power
/// series compared against the eigendecomposition route. Throws
/// ResolutionError when the sampled g has energy near the Nyquist band.
FourierCalculus fourier_calculus(const Matrix& u, const CircleFunction& g, std::size_t n_max,
                                 double gamma, const FourierOptions& options = {});

/// Compactly supported C^3 bump on the arc |arg z - center| < half_width:
/// (1 - (delta/half_width)^2)^4.
Complex arc_bump(Complex z, double center, double half_width);

// Serialization -------------------------------------------------------------

/// Columns: abscissa,re,im,abs,partial_l2 after a "# cmix.series v1" header.
void write_csv(std::ostream& os, const CorrelationSeries& series);
void write_csv(std::ostream& os, const FourierCalculus& fc);

nlohmann::json to_json(const SummabilityReport& r);
nlohmann::json to_json(const DecayReport& r);

}  // namespace cmix
