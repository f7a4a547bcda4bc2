#include "cmix/skew_products.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>

#include "cmix/errors.hpp"

namespace cmix {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr long double kPiL = std::numbers::pi_v<long double>;

double dot(const std::vector<long>& a, const Point& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * x[i];
  return s;
}

double dot(const Frequency& k, const Point& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) s += k[i] * x[i];
  return s;
}

// sum_{j<n} e^{2 pi i j kappa} for n >= 0.
Complex geometric_sum(double kappa, long n) {
  if (n <= 0) return 0.0;
  const long double k = std::remainder(static_cast<long double>(kappa), 1.0L);
  const long double s = std::sin(kPiL * k);
  const long double half_turns = std::remainder(k * static_cast<long double>(n - 1), 2.0L);
  const Complex phase = std::polar(1.0, static_cast<double>(kPiL * half_turns));
  if (std::abs(s) < 1e-13L) return phase * static_cast<double>(n);
  const long double num = std::sin(kPiL * std::remainder(k * static_cast<long double>(n), 2.0L));
  return phase * static_cast<double>(num / s);
}

// Re sum_{j<n} p(x + j y) for a real trigonometric polynomial p, n >= 0.
double birkhoff_sum(const TrigPolynomial& p, const Point& y, const Point& x, long n) {
  Complex s = 0.0;
  for (const auto& [k, c] : p.terms()) {
    s += c * std::polar(1.0, kTwoPi * std::remainder(dot(k, x), 1.0)) * geometric_sum(dot(k, y), n);
  }
  return s.real();
}

// sum |c_k| |sum_{j<n} e^{2 pi i j k.y}|: sup bound of the Birkhoff sum.
double birkhoff_amplitude(const TrigPolynomial& p, const Point& y, long n) {
  double a = 0.0;
  for (const auto& [k, c] : p.terms()) a += std::abs(c) * std::abs(geometric_sum(dot(k, y), n));
  return a;
}

Point lifted(const Point& x, const Point& y, double t) {
  Point out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + t * y[i];
  return out;
}

void require_point(const TorusFlow& flow, const Point& x, const char* what) {
  if (x.size() != flow.dims()) {
    throw DimensionError(std::string(what) + ": point of dimension " + std::to_string(x.size()) +
                         ", flow has " + std::to_string(flow.dims()));
  }
}

void require_compatible(const TorusCocycle& c, const TorusFlow& flow, const char* what) {
  if (c.base_dims() != flow.dims()) {
    throw DimensionError(std::string(what) + ": cocycle base dimension does not match flow");
  }
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1u;
  return p;
}

}  // namespace

RationalProximity rational_proximity(double v, long max_denominator, double near_tol) {
  RationalProximity r;
  r.value = v;
  // Convergents p_k / q_k.
  long p_prev = 1, q_prev = 0, p = 0, q = 1;
  double rem = v;
  long a0 = static_cast<long>(std::floor(rem));
  r.partial_quotients.push_back(a0);
  p = a0;
  rem -= static_cast<double>(a0);
  r.numerator = p;
  r.denominator = q;
  for (int iter = 0; iter < 64 && rem > 1e-15; ++iter) {
    rem = 1.0 / rem;
    const long a = static_cast<long>(std::floor(rem));
    rem -= static_cast<double>(a);
    const long p_next = a * p + p_prev;
    const long q_next = a * q + q_prev;
    if (q_next > max_denominator) break;
    r.partial_quotients.push_back(a);
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
    r.numerator = p;
    r.denominator = q;
  }
  r.distance = std::abs(v - static_cast<double>(r.numerator) / static_cast<double>(r.denominator));
  r.near_rational = r.distance <= near_tol;
  return r;
}

TorusFlow::TorusFlow(std::vector<double> y, long max_denominator, double near_tol)
    : y_(std::move(y)) {
  if (y_.empty()) throw ArgumentError("TorusFlow: y must be non-empty");
  for (double v : y_) {
    if (!(v > 0.0 && v < 1.0)) {
      throw ArgumentError("TorusFlow: translation components must lie in (0,1), got " +
                          std::to_string(v));
    }
    proximity_.push_back(rational_proximity(v, max_denominator, near_tol));
  }
}

bool TorusFlow::near_rational() const {
  return std::any_of(proximity_.begin(), proximity_.end(),
                     [](const RationalProximity& r) { return r.near_rational; });
}

Point flow_step(const TorusFlow& flow, const Point& x, double t) {
  require_point(flow, x, "flow_step");
  Point out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i] + t * flow.y()[i];
    out[i] = v - std::floor(v);
    if (out[i] >= 1.0) out[i] = 0.0;
  }
  return out;
}

TorusCocycle::TorusCocycle(std::vector<std::vector<long>> b, std::vector<EtaTerm> eta,
                           std::vector<long> q)
    : b_(std::move(b)), eta_(std::move(eta)), q_(std::move(q)) {
  if (b_.empty() || b_.front().empty()) throw ArgumentError("TorusCocycle: B must be non-empty");
  base_dims_ = b_.front().size();
  for (const auto& row : b_) {
    if (row.size() != base_dims_) throw DimensionError("TorusCocycle: B rows differ in length");
  }
  if (q_.size() != b_.size()) {
    throw DimensionError("TorusCocycle: q has " + std::to_string(q_.size()) +
                         " components, B has " + std::to_string(b_.size()) + " rows");
  }
  winding_.assign(base_dims_, 0);
  for (std::size_t r = 0; r < b_.size(); ++r) {
    for (std::size_t c = 0; c < base_dims_; ++c) winding_[c] += b_[r][c] * q_[r];
  }

  std::vector<std::vector<FourierTerm>> per_component(b_.size());
  std::vector<FourierTerm> scalar;
  for (const EtaTerm& t : eta_) {
    if (t.component >= b_.size()) throw DimensionError("TorusCocycle: eta component out of range");
    if (t.frequency.size() != base_dims_) {
      throw DimensionError("TorusCocycle: eta frequency has wrong dimension");
    }
    per_component[t.component].push_back({t.frequency, t.coeff});
    scalar.push_back({t.frequency, static_cast<double>(q_[t.component]) * t.coeff});
  }
  for (std::size_t c = 0; c < per_component.size(); ++c) {
    const double defect = TrigPolynomial(base_dims_, per_component[c]).hermitian_defect();
    if (defect > 1e-14) {
      throw StructureError("TorusCocycle: eta component " + std::to_string(c) +
                               " is not real-valued (coefficients not Hermitian-symmetric)",
                           defect);
    }
  }
  q_eta_ = TrigPolynomial(base_dims_, scalar);
}

double TorusCocycle::lyeta_sup(const TorusFlow& flow) const {
  return q_eta_.derivative(flow.y()).coefficient_l1();
}

double cocycle_sum(const TorusCocycle& c, const TorusFlow& flow, const Point& x, long n) {
  require_compatible(c, flow, "cocycle_sum");
  require_point(flow, x, "cocycle_sum");
  if (n == 0) return 0.0;
  if (n < 0) return -cocycle_sum(c, flow, lifted(x, flow.y(), static_cast<double>(n)), -n);
  const double nd = static_cast<double>(n);
  const double linear = nd * dot(c.winding(), x) + dot(c.winding(), flow.y()) * nd * (nd - 1.0) / 2.0;
  return linear + birkhoff_sum(c.q_eta(), flow.y(), x, n);
}

double cocycle_phase(const TorusCocycle& c, const TorusFlow& flow, const Point& x, long n) {
  require_compatible(c, flow, "cocycle_phase");
  require_point(flow, x, "cocycle_phase");
  if (n == 0) return 0.0;
  if (n < 0) {
    return std::remainder(-cocycle_phase(c, flow, lifted(x, flow.y(), static_cast<double>(n)), -n),
                          1.0);
  }
  // n w.x + w.y n(n-1)/2, each reduced mod 1 in extended precision.
  const auto nl = static_cast<long double>(n);
  long double first = 0.0L, second = 0.0L;
  const long double tri = nl * (nl - 1.0L) / 2.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto w = static_cast<long double>(c.winding()[i]);
    first += std::remainder(w * nl * static_cast<long double>(x[i]), 1.0L);
    second += std::remainder(w * tri * static_cast<long double>(flow.y()[i]), 1.0L);
  }
  const double lin = static_cast<double>(std::remainder(first + second, 1.0L));
  return std::remainder(lin + birkhoff_sum(c.q_eta(), flow.y(), x, n), 1.0);
}

GridField sector_apply(const TorusCocycle& c, const TorusFlow& flow, const GridField& f,
                       long steps) {
  require_compatible(c, flow, "sector_apply");
  if (f.dims() != flow.dims()) throw DimensionError("sector_apply: field dimension");
  if (steps == 0) return f;
  require_band_limited(f, "sector_apply");
  const Point s = lifted(Point(flow.dims(), 0.0), flow.y(), static_cast<double>(steps));
  GridField out = shifted(f, s);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] *= std::polar(1.0, kTwoPi * cocycle_phase(c, flow, out.point(i), steps));
  }
  return out;
}

Complex sector_correlation(const TorusCocycle& c, const TorusFlow& flow, const TrigPolynomial& f,
                           const TrigPolynomial& g, long n, std::size_t max_points) {
  require_compatible(c, flow, "sector_correlation");
  if (f.dims() != flow.dims() || g.dims() != flow.dims()) {
    throw DimensionError("sector_correlation: polynomial dimension");
  }
  // Frequencies of e^{2 pi i P} with sup|P| <= amp decay like (2 pi amp)^m / m!.
  const double amp = birkhoff_amplitude(c.q_eta(), flow.y(), std::abs(n));
  const long eta_bw = c.q_eta().bandwidth();
  const long phase_bw = eta_bw * (static_cast<long>(std::ceil(std::numbers::e * kTwoPi * amp)) + 40);
  const long spread = f.bandwidth() + g.bandwidth() + phase_bw;

  Shape shape(flow.dims());
  std::size_t total = 1;
  for (std::size_t a = 0; a < flow.dims(); ++a) {
    const long need = std::abs(c.winding()[a] * n) + spread + 1;
    shape[a] = std::max<std::size_t>(16, next_pow2(static_cast<std::size_t>(need)));
    total *= shape[a];
    if (total > max_points) {
      throw ResolutionError("sector_correlation: quadrature grid would need more than " +
                            std::to_string(max_points) + " points");
    }
  }

  const Point shift = lifted(Point(flow.dims(), 0.0), flow.y(), static_cast<double>(n));
  GridField lattice(shape);
  Complex sum = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    const Point x = lattice.point(i);
    const Complex gx = g(lifted(x, shift, 1.0));
    sum += std::conj(f(x)) * std::polar(1.0, kTwoPi * cocycle_phase(c, flow, x, n)) * gx;
  }
  return sum / static_cast<double>(total);
}

CorrelationSeries sector_correlation_series(const TorusCocycle& c, const TorusFlow& flow,
                                            const TrigPolynomial& f, const TrigPolynomial& g,
                                            std::size_t n_max) {
  if (n_max == 0) throw ArgumentError("sector_correlation_series: n_max must be >= 1");
  std::vector<double> ns;
  std::vector<Complex> values;
  for (std::size_t n = 1; n <= n_max; ++n) {
    ns.push_back(static_cast<double>(n));
    values.push_back(sector_correlation(c, flow, f, g, static_cast<long>(n)));
  }
  return CorrelationSeries::from_values(FlowKind::discrete, std::move(ns), std::move(values));
}

Case1Degree case1_degree(const TorusCocycle& c, const TorusFlow& flow, const Shape& grid,
                         std::size_t n) {
  require_compatible(c, flow, "case1_degree");
  if (n == 0) throw ArgumentError("case1_degree: N must be >= 1");
  if (grid.size() != flow.dims()) throw DimensionError("case1_degree: grid dimension");
  Case1Degree out;
  out.n = n;
  out.limit = kTwoPi * dot(c.winding(), flow.y());
  out.lyeta_sup = c.lyeta_sup(flow);
  const TrigPolynomial ly = c.q_eta().derivative(flow.y());
  out.field = GridField(grid);
  const long nl = static_cast<long>(n);
  for (std::size_t i = 0; i < out.field.size(); ++i) {
    const double avg = birkhoff_sum(ly, flow.y(), out.field.point(i), nl) / static_cast<double>(n);
    const double v = out.limit + kTwoPi * avg;
    out.field[i] = v;
    out.sup_error = std::max(out.sup_error, std::abs(v - out.limit));
  }
  return out;
}

TorusGridModel torus_grid_model(const TorusCocycle& c, const TorusFlow& flow, const Shape& shape) {
  require_compatible(c, flow, "torus_grid_model");
  validate_shape(shape);
  if (shape.size() != flow.dims()) throw DimensionError("torus_grid_model: grid dimension");

  Matrix t = Matrix::Ones(1, 1);
  std::vector<Matrix> axis_a;
  for (std::size_t a = 0; a < shape.size(); ++a) {
    const std::size_t n = shape[a];
    const auto ni = static_cast<Eigen::Index>(n);
    Matrix f(ni, ni);
    RealVector k(ni);
    for (Eigen::Index r = 0; r < ni; ++r) {
      k(r) = static_cast<double>(signed_frequency(static_cast<std::size_t>(r), n));
      for (Eigen::Index l = 0; l < ni; ++l) {
        const double turns = std::remainder(k(r) * static_cast<double>(l) / static_cast<double>(n), 1.0);
        f(r, l) = std::polar(1.0 / std::sqrt(static_cast<double>(n)), -kTwoPi * turns);
      }
    }
    Vector shift_phase(ni);
    RealVector mult(ni);
    for (Eigen::Index r = 0; r < ni; ++r) {
      shift_phase(r) = std::polar(1.0, kTwoPi * std::remainder(k(r) * flow.y()[a], 1.0));
      mult(r) = kTwoPi * k(r) * flow.y()[a];
    }
    const Matrix ta = f.adjoint() * shift_phase.asDiagonal() * f;
    axis_a.push_back(hermitian_part(f.adjoint() * mult.cast<Complex>().asDiagonal() * f));
    t = Matrix(Eigen::kroneckerProduct(t, ta));
  }

  const Eigen::Index dim = t.rows();
  Matrix a_total = Matrix::Zero(dim, dim);
  for (std::size_t a = 0; a < shape.size(); ++a) {
    Matrix term = Matrix::Ones(1, 1);
    for (std::size_t b = 0; b < shape.size(); ++b) {
      const auto nb = static_cast<Eigen::Index>(shape[b]);
      const Matrix factor = a == b ? axis_a[a] : Matrix(Matrix::Identity(nb, nb));
      term = Matrix(Eigen::kroneckerProduct(term, factor));
    }
    a_total += term;
  }

  GridField lattice(shape);
  const TrigPolynomial ly = c.q_eta().derivative(flow.y());
  const double base = dot(c.winding(), flow.y());
  Vector m(dim);
  Vector sym(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const Point x = lattice.point(static_cast<std::size_t>(j));
    const double phase = std::remainder(dot(c.winding(), x) + c.q_eta()(x).real(), 1.0);
    m(j) = std::polar(1.0, kTwoPi * phase);
    sym(j) = kTwoPi * (base + ly(x).real());
  }

  TorusGridModel out;
  out.shape = shape;
  out.u = m.asDiagonal() * t;
  out.a = a_total;
  out.symbol = sym.asDiagonal();
  return out;
}

bool is_special_unitary(const Matrix& g, double tol) {
  if (g.rows() != 2 || g.cols() != 2) return false;
  const double unit = max_norm(g.adjoint() * g - Matrix::Identity(2, 2));
  const Complex det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
  return unit <= tol && std::abs(det - 1.0) <= tol;
}

Matrix su2_irrep(std::size_t n, const Matrix& g) {
  if (g.rows() != 2 || g.cols() != 2) throw DimensionError("su2_irrep: expected a 2x2 matrix");
  if (!is_special_unitary(g, 1e-10)) {
    throw StructureError("su2_irrep: matrix is not in SU(2)",
                         max_norm(g.adjoint() * g - Matrix::Identity(2, 2)));
  }
  const auto dim = static_cast<Eigen::Index>(n + 1);
  // log sqrt(k!(n-k)!) for the orthonormal basis.
  auto log_norm = [n](std::size_t k) {
    return 0.5 * (std::lgamma(static_cast<double>(k) + 1.0) +
                  std::lgamma(static_cast<double>(n - k) + 1.0));
  };
  auto binom = [](std::size_t m, std::size_t r) {
    double b = 1.0;
    for (std::size_t i = 1; i <= r; ++i) b = b * static_cast<double>(m - r + i) / static_cast<double>(i);
    return b;
  };
  auto ipow = [](Complex z, std::size_t e) {
    Complex r = 1.0;
    for (std::size_t i = 0; i < e; ++i) r *= z;
    return r;
  };
  // P(z) -> P(g^T z): z1 -> g00 z1 + g10 z2, z2 -> g01 z1 + g11 z2.
  const Complex g00 = g(0, 0), g10 = g(1, 0), g01 = g(0, 1), g11 = g(1, 1);
  Matrix pi = Matrix::Zero(dim, dim);
  for (std::size_t k = 0; k <= n; ++k) {
    for (std::size_t a = 0; a <= k; ++a) {
      for (std::size_t b = 0; b <= n - k; ++b) {
        const std::size_t j = a + b;
        const Complex term = binom(k, a) * binom(n - k, b) * ipow(g00, a) * ipow(g10, k - a) *
                             ipow(g01, b) * ipow(g11, n - k - b);
        pi(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) +=
            term * std::exp(log_norm(j) - log_norm(k));
      }
    }
  }
  return pi;
}

SU2Cocycle::SU2Cocycle(Matrix h, std::vector<long> b, TrigPolynomial eta, std::size_t n)
    : h_(std::move(h)), b_(std::move(b)), eta_(std::move(eta)), n_(n) {
  if (!is_special_unitary(h_, 1e-12)) {
    throw StructureError("SU2Cocycle: h must satisfy h*h = I and det h = 1 to 1e-12",
                         h_.rows() == 2 && h_.cols() == 2
                             ? max_norm(h_.adjoint() * h_ - Matrix::Identity(2, 2))
                             : 0.0);
  }
  if (b_.empty() || std::all_of(b_.begin(), b_.end(), [](long v) { return v == 0; })) {
    throw ArgumentError("SU2Cocycle: b must be a nonzero integer vector");
  }
  if (eta_.empty()) eta_ = TrigPolynomial(b_.size(), {});
  if (eta_.dims() != b_.size()) throw DimensionError("SU2Cocycle: eta dimension differs from b");
  const double defect = eta_.hermitian_defect();
  if (defect > 1e-14) throw StructureError("SU2Cocycle: eta is not real-valued", defect);
}

double SU2Cocycle::theta(const Point& x) const {
  return dot(b_, x) + eta_(x).real();
}

Matrix SU2Cocycle::value(const Point& x) const {
  const double th = kTwoPi * std::remainder(theta(x), 1.0);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = std::polar(1.0, th);
  d(1, 1) = std::polar(1.0, -th);
  return h_ * d * h_.adjoint();
}

Case2Degree case2_degree(const SU2Cocycle& c, const TorusFlow& flow, const Shape& grid,
                         std::size_t n_steps, double kernel_tol) {
  if (c.b().size() != flow.dims()) throw DimensionError("case2_degree: b dimension differs from flow");
  if (grid.size() != flow.dims()) throw DimensionError("case2_degree: grid dimension");
  if (n_steps == 0) throw ArgumentError("case2_degree: N must be >= 1");
  validate_shape(grid);

  const std::size_t rep = c.n();
  const auto dim = static_cast<Eigen::Index>(rep + 1);
  const Matrix ph = su2_irrep(rep, c.h());
  const Matrix ph_adj = ph.adjoint();
  const TrigPolynomial ly = c.eta().derivative(flow.y());
  const double yb = dot(c.b(), flow.y());
  RealVector weight(dim);
  for (Eigen::Index k = 0; k < dim; ++k) weight(k) = static_cast<double>(2 * k - static_cast<long>(rep));

  Case2Degree out;
  out.n = n_steps;
  out.kernel_tol = kernel_tol;
  out.field.shape = grid;
  const std::size_t points = flat_size(grid);
  out.field.values.resize(points);
  Matrix sum_all = Matrix::Zero(dim, dim);

  Vector mult(dim), phase(dim);
  for (std::size_t i = 0; i < points; ++i) {
    const Point x0 = out.field.point(i);
    Matrix acc = Matrix::Zero(dim, dim);
    Matrix cocycle = Matrix::Identity(dim, dim);  // pi(phi^{(m)}(x0))
    for (std::size_t m = 0; m < n_steps; ++m) {
      const Point xm = lifted(x0, flow.y(), static_cast<double>(m));
      const double rate = kTwoPi * (yb + ly(xm).real());
      const double th = kTwoPi * std::remainder(c.theta(xm), 1.0);
      for (Eigen::Index k = 0; k < dim; ++k) {
        mult(k) = rate * weight(k);
        phase(k) = std::polar(1.0, th * weight(k));
      }
      const Matrix w = cocycle * ph;
      acc.noalias() += w * mult.asDiagonal() * w.adjoint();
      cocycle = w * phase.asDiagonal() * ph_adj;
    }
    acc /= static_cast<double>(n_steps);
    out.field.values[i] = hermitian_part(acc);
    sum_all += out.field.values[i];
  }
  out.limit = hermitian_part(sum_all / static_cast<double>(points));
  for (const Matrix& v : out.field.values) {
    out.sup_deviation = std::max(out.sup_deviation, max_norm(v - out.limit));
  }

  Eigen::SelfAdjointEigenSolver<Matrix> solver(out.limit, Eigen::EigenvaluesOnly);
  out.eigenvalues = solver.eigenvalues();
  out.expected.resize(dim);
  for (Eigen::Index k = 0; k < dim; ++k) out.expected(k) = kTwoPi * yb * weight(k);
  std::sort(out.expected.begin(), out.expected.end());
  const double scale = out.expected.cwiseAbs().maxCoeff();
  const double err = (out.eigenvalues - out.expected).cwiseAbs().maxCoeff();
  out.max_relative_error = scale > 0.0 ? err / scale : err;

  const KernelSplit split = kernel_split(out.limit, kernel_tol);
  out.kernel_dim = split.kernel_dim;
  return out;
}

RMembership case3_R_membership(long m, long n, const std::vector<long>& b1,
                               const std::vector<long>& b2, const Point& y, double tol) {
  if (n < 0) throw ArgumentError("case3_R_membership: n must be >= 0");
  if (b1.size() != y.size() || b2.size() != y.size()) {
    throw DimensionError("case3_R_membership: b1, b2 and y must share a dimension");
  }
  double plus = 0.0, minus = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    plus += static_cast<double>(b1[i] + b2[i]) * y[i];
    minus += static_cast<double>(b1[i] - b2[i]) * y[i];
  }
  RMembership r;
  r.tol = tol;
  r.infimum = std::numeric_limits<double>::infinity();
  for (long k = 0; k <= n; ++k) {
    const double v = std::abs(static_cast<double>(2 * m - n) * plus + static_cast<double>(2 * k - n) * minus);
    if (v < r.infimum) {
      r.infimum = v;
      r.argmin_k = k;
    }
  }
  r.member = r.infimum > tol;
  return r;
}

ShiftWeylModel shift_weyl_model(std::size_t window, std::size_t margin) {
  if (window < 2) throw ArgumentError("shift_weyl_model: window must be >= 2");
  if (2 * margin >= window) {
    throw ArgumentError("shift_weyl_model: margin " + std::to_string(margin) +
                        " must be below window/2 = " + std::to_string(window / 2.0));
  }
  const auto n = static_cast<Eigen::Index>(window);
  Matrix u = Matrix::Zero(n, n);
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    u((k + 1) % n, k) = 1.0;
    a(k, k) = static_cast<double>(k);
  }
  std::vector<std::size_t> interior;
  const std::size_t lo = std::max<std::size_t>(margin, 1);
  for (std::size_t k = lo; k + lo < window; ++k) interior.push_back(k);
  return ShiftWeylModel{OperatorPair::discrete(std::move(u), std::move(a)), window, margin,
                        std::move(interior)};
}

}  // namespace cmix
