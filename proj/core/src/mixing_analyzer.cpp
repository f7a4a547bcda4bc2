#include "cmix/mixing_analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include <unsupported/Eigen/FFT>

#include "cmix/errors.hpp"

namespace cmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit fit;
  if (x.size() < 2) return fit;
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1u;
  return p;
}

}  // namespace

CorrelationSeries CorrelationSeries::from_values(FlowKind kind, std::vector<double> abscissae,
                                                 std::vector<Complex> values) {
  if (abscissae.size() != values.size()) {
    throw DimensionError("CorrelationSeries: abscissae and values differ in length");
  }
  CorrelationSeries s;
  s.kind = kind;
  s.abscissae = std::move(abscissae);
  s.values = std::move(values);
  s.partial_l2.resize(s.values.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    const double mag2 = std::norm(s.values[k]);
    if (kind == FlowKind::discrete) {
      acc += mag2;
    } else if (k > 0) {
      const double dt = s.abscissae[k] - s.abscissae[k - 1];
      acc += 0.5 * dt * (mag2 + std::norm(s.values[k - 1]));
    }
    s.partial_l2[k] = acc;
  }
  return s;
}

CorrelationSeries correlation_discrete(const Matrix& u, const Vector& phi, const Vector& psi,
                                       std::size_t n_max) {
  require_square(u, "correlation_discrete");
  if (n_max == 0) throw ArgumentError("correlation_discrete: N_max must be >= 1");
  if (phi.size() != u.rows() || psi.size() != u.rows()) {
    throw DimensionError("correlation_discrete: vector dimension");
  }
  std::vector<double> ns;
  std::vector<Complex> values;
  ns.reserve(n_max);
  values.reserve(n_max);
  Vector iterate = psi;
  for (std::size_t n = 1; n <= n_max; ++n) {
    iterate = u * iterate;
    ns.push_back(static_cast<double>(n));
    values.push_back(phi.dot(iterate));
  }
  return CorrelationSeries::from_values(FlowKind::discrete, std::move(ns), std::move(values));
}

CorrelationSeries correlation_continuous(const Matrix& h, const Vector& phi, const Vector& psi,
                                         const std::vector<double>& times) {
  require_square(h, "correlation_continuous");
  if (phi.size() != h.rows() || psi.size() != h.rows()) {
    throw DimensionError("correlation_continuous: vector dimension");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) {
      throw ArgumentError("correlation_continuous: times must be strictly increasing");
    }
  }
  const SpectralDecomposition dec = decompose(h);
  const Vector a = dec.eigenvectors.adjoint() * phi;
  const Vector b = dec.eigenvectors.adjoint() * psi;
  const RealVector lambda = dec.eigenvalues.real();
  std::vector<Complex> values;
  values.reserve(times.size());
  for (double t : times) {
    Complex c = 0.0;
    for (Eigen::Index j = 0; j < lambda.size(); ++j) {
      c += std::conj(a(j)) * b(j) * std::polar(1.0, -t * lambda(j));
    }
    values.push_back(c);
  }
  return CorrelationSeries::from_values(FlowKind::continuous, times, std::move(values));
}

SummabilityReport summability_report(const CorrelationSeries& series,
                                     const SummabilityOptions& options) {
  const std::size_t n = series.size();
  if (n < 16) throw ArgumentError("summability_report: need at least 16 samples");
  SummabilityReport r;
  r.options = options;
  r.total = series.partial_l2.back();

  const std::size_t first_late = (2 * n) / 3;
  const double before = series.partial_l2[first_late - 1];
  const double late = r.total - before;
  r.tail_fraction = r.total > 0.0 ? late / r.total : 0.0;
  r.saturating = r.tail_fraction < options.saturation_fraction;

  // Increment density over the second half of the horizon.
  std::vector<double> lx, ly;
  const double floor = 1e-300;
  for (std::size_t k = n / 2; k < n; ++k) {
    const double dx = k == 0 ? 1.0 : series.abscissae[k] - series.abscissae[k - 1];
    const double inc = (series.partial_l2[k] - (k ? series.partial_l2[k - 1] : 0.0)) /
                       (series.kind == FlowKind::discrete ? 1.0 : dx);
    const double x = series.abscissae[k];
    if (inc > floor && x > 0.0) {
      lx.push_back(std::log(x));
      ly.push_back(std::log(inc));
    }
  }
  if (lx.size() >= 2) {
    const LineFit fit = fit_line(lx, ly);
    r.tail_slope = fit.slope;
    r.linear_growth = fit.slope > options.growth_slope;
    if (fit.slope < -1.0) {
      const double x_h = series.abscissae.back();
      const double c = std::exp(fit.intercept);
      r.extrapolated_total = r.total + c * std::pow(x_h, fit.slope + 1.0) / (-fit.slope - 1.0);
    } else {
      r.extrapolated_total = kInf;
    }
  } else {
    // Tail increments vanish identically.
    r.tail_slope = -kInf;
    r.linear_growth = false;
    r.extrapolated_total = r.total;
  }
  return r;
}

DecayReport decay_report(const CorrelationSeries& series, double fraction) {
  const std::size_t n = series.size();
  if (n < 4) throw ArgumentError("decay_report: need at least 4 samples");
  DecayReport r;
  r.fraction = fraction;
  const std::size_t q = n / 4;
  for (std::size_t k = 0; k < q; ++k) r.early_max = std::max(r.early_max, std::abs(series.values[k]));
  for (std::size_t k = n - q; k < n; ++k) {
    r.late_max = std::max(r.late_max, std::abs(series.values[k]));
  }
  r.decayed = r.late_max < fraction * r.early_max;
  return r;
}

PerpEigenReport eigen_in_perp(const Matrix& op, const KernelSplit& split,
                              const OperatorAction& full_residual) {
  require_square(op, "eigen_in_perp");
  if (split.perp_basis.rows() != op.rows()) {
    throw DimensionError("eigen_in_perp: split does not match operator");
  }
  PerpEigenReport report;
  report.perp_dim = static_cast<std::size_t>(split.perp_basis.cols());
  report.min_residual = kInf;
  if (report.perp_dim == 0) return report;

  const Matrix& q = split.perp_basis;
  const Matrix compressed = q.adjoint() * op * q;
  Eigen::ComplexEigenSolver<Matrix> solver(compressed);
  if (solver.info() != Eigen::Success) {
    throw StructureError("eigen_in_perp: eigensolver failed", 0.0);
  }
  for (Eigen::Index j = 0; j < solver.eigenvalues().size(); ++j) {
    const Complex lambda = solver.eigenvalues()(j);
    Vector v = q * solver.eigenvectors().col(j);
    v /= v.norm();
    const double res =
        full_residual ? full_residual(v, lambda) : (op * v - lambda * v).norm();
    report.pairs.push_back({lambda, res});
  }
  std::stable_sort(report.pairs.begin(), report.pairs.end(),
                   [](const PerpEigenpair& x, const PerpEigenpair& y) {
                     return x.residual < y.residual;
                   });
  report.min_residual = report.pairs.front().residual;
  return report;
}

Complex arc_bump(Complex z, double center, double half_width) {
  const double delta = std::remainder(std::arg(z) - center, 2.0 * std::numbers::pi);
  const double x = delta / half_width;
  if (std::abs(x) >= 1.0) return 0.0;
  const double s = 1.0 - x * x;
  return (s * s) * (s * s);
}

FourierCalculus fourier_calculus(const Matrix& u, const CircleFunction& g, std::size_t n_max,
                                 double gamma, const FourierOptions& options) {
  require_square(u, "fourier_calculus");
  if (n_max == 0) throw ArgumentError("fourier_calculus: n_max must be >= 1");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ArgumentError("fourier_calculus: gamma in [0,1)");
  const std::size_t grid = options.grid ? options.grid : next_pow2(8 * n_max);
  if (grid < 4 * n_max) throw ArgumentError("fourier_calculus: grid must be >= 4 n_max");

  std::vector<Complex> samples(grid);
  for (std::size_t j = 0; j < grid; ++j) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(grid);
    samples[j] = g(std::polar(1.0, theta));
    if (!std::isfinite(samples[j].real()) || !std::isfinite(samples[j].imag())) {
      throw EvaluationError("fourier_calculus: g is not finite on the circle grid");
    }
  }
  std::vector<Complex> spectrum;
  Eigen::FFT<double> fft;
  fft.fwd(spectrum, samples);
  const double inv = 1.0 / static_cast<double>(grid);
  auto coeff = [&](long n) {
    const long m = static_cast<long>(grid);
    return spectrum[static_cast<std::size_t>(((n % m) + m) % m)] * inv;
  };

  FourierCalculus fc;
  fc.n_max = n_max;
  fc.gamma = gamma;
  fc.grid = grid;

  double total = 0.0, high = 0.0;
  const long half = static_cast<long>(grid / 2);
  for (long n = -half; n < half; ++n) {
    const double e = std::norm(coeff(n));
    total += e;
    if (8 * std::abs(n) >= 3 * static_cast<long>(grid)) high += e;
  }
  fc.nyquist_energy = total > 0.0 ? high / total : 0.0;
  if (fc.nyquist_energy > options.aliasing_threshold) {
    throw ResolutionError("fourier_calculus: circle grid of " + std::to_string(grid) +
                          " points does not resolve g (Nyquist-band energy " +
                          std::to_string(fc.nyquist_energy) + ")");
  }

  const long nm = static_cast<long>(n_max);
  fc.coefficients.resize(2 * n_max + 1);
  double cmax = 0.0;
  for (long n = -nm; n <= nm; ++n) {
    fc.coefficients[static_cast<std::size_t>(n + nm)] = coeff(n);
    cmax = std::max(cmax, std::abs(coeff(n)));
  }

  const double p = 2.0 + gamma;
  std::vector<double> lx, ly;
  for (long n = -nm; n <= nm; ++n) {
    const double a = std::abs(fc.coefficient(n));
    fc.declared_constant = std::max(fc.declared_constant, a * std::pow(1.0 + std::abs(n), p));
    if (std::abs(n) >= static_cast<long>(options.fit_min) && a > 1e-14 * cmax) {
      lx.push_back(std::log(1.0 + std::abs(n)));
      ly.push_back(std::log(a));
    }
  }
  const LineFit fit = fit_line(lx, ly);
  fc.fit_exponent = fit.slope;
  fc.fit_constant = std::exp(fit.intercept);
  // sum_{|n| > n_max} (1+|n|)^{-p} <= 2 (n_max+1)^{1-p} / (p-1)
  fc.tail_bound = fc.declared_constant * 2.0 * std::pow(static_cast<double>(n_max) + 1.0, 1.0 - p) /
                  (p - 1.0);

  // Power-series route, independent of the eigendecomposition.
  Matrix series = fc.coefficient(0) * identity_like(u);
  Matrix power = identity_like(u);
  for (long n = 1; n <= nm; ++n) {
    power = power * u;
    series += fc.coefficient(n) * power + fc.coefficient(-n) * power.adjoint();
  }
  fc.reconstruction_error = max_norm(series - functional_calculus(u, g));
  return fc;
}

void write_csv(std::ostream& os, const CorrelationSeries& s) {
  os << "# cmix.series v" << kSeriesCsvVersion << " kind=" << to_string(s.kind) << "\n";
  os << "abscissa,re,im,abs,partial_l2\n";
  const auto old = os.precision(17);
  for (std::size_t k = 0; k < s.size(); ++k) {
    os << s.abscissae[k] << ',' << s.values[k].real() << ',' << s.values[k].imag() << ','
       << std::abs(s.values[k]) << ',' << s.partial_l2[k] << '\n';
  }
  os.precision(old);
}

void write_csv(std::ostream& os, const FourierCalculus& fc) {
  os << "# cmix.fourier v" << kSeriesCsvVersion << " n_max=" << fc.n_max << " gamma=" << fc.gamma
     << "\n";
  os << "abscissa,re,im,abs,partial_l2\n";
  const auto old = os.precision(17);
  double acc = 0.0;
  const long nm = static_cast<long>(fc.n_max);
  for (long n = -nm; n <= nm; ++n) {
    const Complex c = fc.coefficient(n);
    acc += std::norm(c);
    os << n << ',' << c.real() << ',' << c.imag() << ',' << std::abs(c) << ',' << acc << '\n';
  }
  os.precision(old);
}

nlohmann::json to_json(const SummabilityReport& r) {
  auto finite_or_null = [](double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
  };
  return {{"saturating", r.saturating},
          {"linear_growth", r.linear_growth},
          {"tail_slope", finite_or_null(r.tail_slope)},
          {"total", r.total},
          {"tail_fraction", r.tail_fraction},
          {"extrapolated_total", finite_or_null(r.extrapolated_total)},
          {"thresholds",
           {{"saturation_fraction", r.options.saturation_fraction},
            {"growth_slope", r.options.growth_slope}}}};
}

nlohmann::json to_json(const DecayReport& r) {
  return {{"decayed", r.decayed},
          {"early_max", r.early_max},
          {"late_max", r.late_max},
          {"thresholds", {{"fraction", r.fraction}}}};
}

}  // namespace cmix
