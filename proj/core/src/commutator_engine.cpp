#include "cmix/commutator_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmix/errors.hpp"
#include "cmix/matrix_io.hpp"

namespace cmix {

const char* to_string(FlowKind kind) {
  return kind == FlowKind::discrete ? "discrete" : "continuous";
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_structure(const Matrix& m, StructureKind kind, double tol, const char* what) {
  const double scale = kind == StructureKind::hermitian ? std::max(1.0, max_norm(m)) : 1.0;
  const StructureReport report = check_structure(m, kind, tol * scale);
  if (!report.pass) {
    throw StructureError(std::string(what) + " failed its " +
                             (kind == StructureKind::unitary ? "unitarity" : "hermiticity") +
                             " check",
                         report.deviation);
  }
}

Matrix checked_hermitian(const Matrix& m, double tol, const char* what) {
  const double dev = max_norm(m - m.adjoint());
  if (dev > tol * std::max(1.0, max_norm(m))) {
    throw StructureError(std::string(what) + ": result is not Hermitian", dev);
  }
  return hermitian_part(m);
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  const double denom = n * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

}  // namespace

OperatorPair OperatorPair::discrete(Matrix u, Matrix a, double tol) {
  require_same_dim(u, a, "OperatorPair::discrete");
  require_structure(u, StructureKind::unitary, tol, "OperatorPair: U");
  require_structure(a, StructureKind::hermitian, tol, "OperatorPair: A");
  return OperatorPair(std::move(u), std::move(a), FlowKind::discrete);
}

OperatorPair OperatorPair::continuous(Matrix h, Matrix a, double tol) {
  require_same_dim(h, a, "OperatorPair::continuous");
  require_structure(h, StructureKind::hermitian, tol, "OperatorPair: H");
  require_structure(a, StructureKind::hermitian, tol, "OperatorPair: A");
  return OperatorPair(std::move(h), std::move(a), FlowKind::continuous);
}

Matrix unitary_symbol(const OperatorPair& pair) {
  if (pair.kind() != FlowKind::discrete) {
    throw ArgumentError("unitary_symbol: pair must be discrete");
  }
  const Matrix& u = pair.main();
  const Matrix& a = pair.conjugate();
  return checked_hermitian(commutator(a, u) * u.adjoint(), 1e-10, "unitary_symbol");
}

Matrix selfadjoint_symbol(const OperatorPair& pair) {
  if (pair.kind() != FlowKind::continuous) {
    throw ArgumentError("selfadjoint_symbol: pair must be continuous");
  }
  const Matrix& h = pair.main();
  const Matrix& a = pair.conjugate();
  const Matrix r_plus = resolvent(h, -kI);   // (H + i)^{-1}
  const Matrix r_minus = resolvent(h, kI);   // (H - i)^{-1}
  return checked_hermitian(r_plus * (kI * commutator(h, a)) * r_minus, 1e-10,
                           "selfadjoint_symbol");
}

Matrix symbol(const OperatorPair& pair) {
  return pair.kind() == FlowKind::discrete ? unitary_symbol(pair) : selfadjoint_symbol(pair);
}

Matrix tilde_conjugate(const OperatorPair& pair) {
  if (pair.kind() != FlowKind::continuous) {
    throw ArgumentError("tilde_conjugate: pair must be continuous");
  }
  const Matrix& h = pair.main();
  return checked_hermitian(resolvent(h, -kI) * pair.conjugate() * resolvent(h, kI), 1e-10,
                           "tilde_conjugate");
}

Matrix matrix_power(const Matrix& u, std::size_t n) {
  require_square(u, "matrix_power");
  Matrix result = identity_like(u);
  Matrix base = u;
  while (n > 0) {
    if (n & 1u) result = result * base;
    n >>= 1u;
    if (n > 0) base = base * base;
  }
  return result;
}

std::vector<Matrix> birkhoff_discrete_schedule(const Matrix& u, const Matrix& m,
                                               const std::vector<std::size_t>& schedule) {
  require_same_dim(u, m, "birkhoff_discrete");
  if (schedule.empty()) throw ArgumentError("birkhoff_discrete: empty schedule");
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (schedule[k] == 0) throw ArgumentError("birkhoff_discrete: N must be >= 1");
    if (k > 0 && schedule[k] <= schedule[k - 1]) {
      throw ArgumentError("birkhoff_discrete: schedule must be strictly increasing");
    }
  }
  std::vector<Matrix> out;
  out.reserve(schedule.size());
  const Matrix u_adj = u.adjoint();
  Matrix conjugated = m;
  Matrix sum = Matrix::Zero(m.rows(), m.cols());
  std::size_t next = 0;
  for (std::size_t n = 0; n < schedule.back(); ++n) {
    sum += conjugated;
    if (n + 1 == schedule[next]) {
      out.push_back(sum / static_cast<double>(n + 1));
      ++next;
    }
    if (n + 1 < schedule.back()) conjugated = u * conjugated * u_adj;
  }
  return out;
}

Matrix birkhoff_discrete(const Matrix& u, const Matrix& m, std::size_t n) {
  if (n == 0) throw ArgumentError("birkhoff_discrete: N must be >= 1");
  return birkhoff_discrete_schedule(u, m, {n}).front();
}

Matrix propagator(const SpectralDecomposition& h_dec, double t) {
  Vector phases(h_dec.eigenvalues.size());
  for (Eigen::Index j = 0; j < phases.size(); ++j) {
    phases(j) = std::polar(1.0, -t * h_dec.eigenvalues(j).real());
  }
  return h_dec.eigenvectors * phases.asDiagonal() * h_dec.eigenvectors.adjoint();
}

namespace {

// Integrand of the continuous average expressed in the eigenbasis of H:
// F(s)_jk = e^{is(l_j - l_k)} M~_jk.
class EigenbasisIntegrand {
 public:
  EigenbasisIntegrand(const SpectralDecomposition& dec, const Matrix& m)
      : lambda_(dec.eigenvalues.real()),
        m_eig_(dec.eigenvectors.adjoint() * m * dec.eigenvectors) {}

  Matrix operator()(double s) {
    ++evaluations_;
    const Eigen::Index d = lambda_.size();
    Vector e(d);
    for (Eigen::Index j = 0; j < d; ++j) e(j) = std::polar(1.0, s * lambda_(j));
    return e.asDiagonal() * m_eig_ * e.conjugate().asDiagonal();
  }

  std::size_t evaluations() const { return evaluations_; }
  double spread() const {
    return lambda_.size() ? lambda_.maxCoeff() - lambda_.minCoeff() : 0.0;
  }

 private:
  RealVector lambda_;
  Matrix m_eig_;
  std::size_t evaluations_ = 0;
};

struct SimpsonState {
  EigenbasisIntegrand& f;
  const QuadratureRule& rule;
  Matrix sum;
  double error = 0.0;
  std::size_t panels = 0;
};

void adaptive_simpson(SimpsonState& st, double a, double b, const Matrix& fa, const Matrix& fm,
                      const Matrix& fb, const Matrix& whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double h = b - a;
  const Matrix flm = st.f(0.5 * (a + m));
  const Matrix frm = st.f(0.5 * (m + b));
  if (st.f.evaluations() > st.rule.max_nodes) {
    throw QuadratureError("birkhoff_continuous: node budget of " +
                          std::to_string(st.rule.max_nodes) + " exhausted");
  }
  const Matrix left = (h / 12.0) * (fa + 4.0 * flm + fm);
  const Matrix right = (h / 12.0) * (fm + 4.0 * frm + fb);
  const Matrix refined = left + right;
  const double err = max_norm(refined - whole) / 15.0;
  if (err <= tol) {
    st.sum += refined + (refined - whole) / 15.0;
    st.error += err;
    ++st.panels;
    return;
  }
  if (depth >= st.rule.max_depth) {
    throw QuadratureError("birkhoff_continuous: maximum bisection depth reached");
  }
  adaptive_simpson(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1);
  adaptive_simpson(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

ContinuousAverage birkhoff_continuous(const SpectralDecomposition& h_dec, const Matrix& m,
                                      double t, const QuadratureRule& rule) {
  if (static_cast<std::size_t>(m.rows()) != h_dec.dim() || m.rows() != m.cols()) {
    throw DimensionError("birkhoff_continuous: dimension mismatch");
  }
  if (!(t > 0.0) || !std::isfinite(t)) throw ArgumentError("birkhoff_continuous: t must be > 0");
  if (rule.min_panels == 0 || rule.max_nodes < 3 || !(rule.abs_tol > 0.0)) {
    throw ArgumentError("birkhoff_continuous: invalid quadrature rule");
  }

  EigenbasisIntegrand f(h_dec, m);
  const double m_norm = op_norm(m);
  const double total_tol = std::max(rule.abs_tol, rule.rel_tol * t * m_norm);
  const auto oscillation_panels = static_cast<std::size_t>(std::ceil(t * f.spread()));
  const std::size_t panels = std::max(rule.min_panels, oscillation_panels);
  if (2 * panels + 1 > rule.max_nodes) {
    throw QuadratureError("birkhoff_continuous: node budget below the oscillation resolution");
  }

  SimpsonState st{f, rule, Matrix::Zero(m.rows(), m.cols())};
  const double h = t / static_cast<double>(panels);
  Matrix fa = f(0.0);
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = h * static_cast<double>(p);
    const double b = p + 1 == panels ? t : h * static_cast<double>(p + 1);
    const Matrix fm = f(0.5 * (a + b));
    const Matrix fb = f(b);
    const Matrix whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
    adaptive_simpson(st, a, b, fa, fm, fb, whole, total_tol * (b - a) / t, 0);
    fa = fb;
  }

  ContinuousAverage out;
  out.value = hermitian_part(h_dec.eigenvectors * (st.sum / t) * h_dec.eigenvectors.adjoint());
  out.nodes = f.evaluations();
  out.panels = st.panels;
  const double dim = static_cast<double>(m.rows());
  out.roundoff_floor =
      8.0 * kEps * t * std::max(1.0, m_norm) * (dim + std::sqrt(static_cast<double>(out.nodes)));
  out.integral_error = st.error + out.roundoff_floor;
  out.error_estimate = out.integral_error / t;
  return out;
}

ContinuousAverage birkhoff_continuous(const Matrix& h, const Matrix& m, double t,
                                      const QuadratureRule& rule) {
  require_same_dim(h, m, "birkhoff_continuous");
  return birkhoff_continuous(decompose(h), m, t, rule);
}

IdentityResidual degree_identity_check(const OperatorPair& pair, std::size_t n) {
  if (pair.kind() != FlowKind::discrete) {
    throw ArgumentError("degree_identity_check: pair must be discrete");
  }
  if (n == 0) throw ArgumentError("degree_identity_check: N must be >= 1");
  const Matrix& u = pair.main();
  const Matrix& a = pair.conjugate();
  const Matrix d_n = birkhoff_discrete(u, unitary_symbol(pair), n);
  const Matrix u_n = matrix_power(u, n);
  const double nd = static_cast<double>(n);

  IdentityResidual out;
  out.n = n;
  out.residual = op_norm(commutator(a, u_n) - nd * d_n * u_n);
  const double a_norm = op_norm(a);
  out.expected =
      static_cast<double>(pair.dim()) * 1e-12 * (a_norm + nd * op_norm(d_n));
  out.bound = 1e-9 * (1.0 + a_norm) * (1.0 + nd);
  out.pass = out.residual <= out.bound;
  return out;
}

Matrix degree_alternative(const OperatorPair& pair, std::size_t n) {
  if (pair.kind() != FlowKind::discrete) {
    throw ArgumentError("degree_alternative: pair must be discrete");
  }
  if (n == 0) throw ArgumentError("degree_alternative: N must be >= 1");
  const Matrix u_n = matrix_power(pair.main(), n);
  return hermitian_part(commutator(pair.conjugate(), u_n) * u_n.adjoint() /
                        static_cast<double>(n));
}

FlowIdentityResidual flow_identity_check(const OperatorPair& pair, double t,
                                         const QuadratureRule& rule) {
  if (pair.kind() != FlowKind::continuous) {
    throw ArgumentError("flow_identity_check: pair must be continuous");
  }
  if (!(t >= 0.0)) throw ArgumentError("flow_identity_check: t must be >= 0");
  FlowIdentityResidual out;
  out.t = t;
  if (t == 0.0) {
    out.pass = true;
    return out;
  }
  const SpectralDecomposition dec = decompose(pair.main());
  const Matrix a_tilde = tilde_conjugate(pair);
  const Matrix prop = propagator(dec, t);
  const ContinuousAverage d_t = birkhoff_continuous(dec, selfadjoint_symbol(pair), t, rule);
  out.residual = op_norm(commutator(a_tilde, prop) - t * prop * d_t.value);
  out.quadrature_error = d_t.integral_error;
  out.pass = out.residual <= 10.0 * out.quadrature_error;
  return out;
}

CayleyBridge cayley_bridge(const Matrix& u, const Matrix& a) {
  const Matrix h = cayley_transform(u);
  const Matrix id = identity_like(u);
  CayleyBridge out;
  out.roundtrip = op_norm(u - inverse_cayley_transform(h));
  out.resolvent_identity = op_norm(resolvent(h, -kI) - (id - u) / (2.0 * kI));
  const Matrix s_cont = selfadjoint_symbol(OperatorPair::continuous(h, a));
  const Matrix s_disc = unitary_symbol(OperatorPair::discrete(u, a));
  out.symbol_gap = op_norm(s_cont + 0.5 * s_disc);
  return out;
}

DegreeEstimate estimate_degree_from_symbol(FlowKind kind, const Matrix& main,
                                           const Matrix& symbol_matrix,
                                           const std::vector<double>& schedule,
                                           const std::vector<Vector>& probes,
                                           const DegreeOptions& options) {
  require_same_dim(main, symbol_matrix, "estimate_degree");
  if (schedule.empty()) throw ArgumentError("estimate_degree: empty schedule");
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const double s = schedule[k];
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw ArgumentError("estimate_degree: schedule entries must be positive");
    }
    if (kind == FlowKind::discrete && s != std::floor(s)) {
      throw ArgumentError("estimate_degree: discrete schedule entries must be integers");
    }
    if (k > 0 && !(s > schedule[k - 1])) {
      throw ArgumentError("estimate_degree: schedule must be strictly increasing");
    }
  }
  for (const Vector& p : probes) {
    if (p.size() != main.rows()) throw DimensionError("estimate_degree: probe dimension");
    if (std::abs(p.norm() - 1.0) > 1e-8) {
      throw ArgumentError("estimate_degree: probes must be normalized");
    }
  }
  if (options.reference) require_same_dim(main, *options.reference, "estimate_degree");

  DegreeEstimate est;
  est.kind = kind;
  est.schedule = schedule;
  est.cauchy_threshold = options.cauchy_threshold;

  std::vector<Matrix> averages;
  if (kind == FlowKind::discrete) {
    std::vector<std::size_t> ns;
    ns.reserve(schedule.size());
    for (double s : schedule) ns.push_back(static_cast<std::size_t>(s));
    averages = birkhoff_discrete_schedule(main, symbol_matrix, ns);
  } else {
    const SpectralDecomposition dec = decompose(main);
    for (double t : schedule) {
      ContinuousAverage avg = birkhoff_continuous(dec, symbol_matrix, t, options.quadrature);
      est.quadrature.push_back({t, avg.error_estimate, avg.nodes});
      averages.push_back(std::move(avg.value));
    }
  }
  est.limit = averages.back();

  for (std::size_t k = 1; k < averages.size(); ++k) {
    est.cauchy_gaps.push_back(op_norm(averages[k] - averages[k - 1]));
  }
  const Matrix& target = options.reference ? *options.reference : est.limit;
  est.reference_used = options.reference.has_value();
  for (const Vector& p : probes) {
    std::vector<double> res;
    res.reserve(averages.size());
    for (const Matrix& avg : averages) res.push_back(((avg - target) * p).norm());
    est.probe_residuals.push_back(std::move(res));
  }

  if (!est.cauchy_gaps.empty()) {
    const std::size_t g = est.cauchy_gaps.size();
    const std::size_t first = std::min(g - 1, (2 * g) / 3);
    const double scale = std::max(1.0, op_norm(est.limit));
    bool below = true;
    bool decreasing = true;
    for (std::size_t k = first; k < g; ++k) {
      below = below && est.cauchy_gaps[k] <= options.cauchy_threshold * scale;
      if (k > first && est.cauchy_gaps[k] >= est.cauchy_gaps[k - 1]) decreasing = false;
    }
    if (g - first < 2 && first > 0) {
      decreasing = est.cauchy_gaps[g - 1] < est.cauchy_gaps[g - 2];
    }
    est.settled = below;
    est.diverging = !below && !decreasing;
  }
  if (options.keep_averages) est.averages = std::move(averages);
  return est;
}

DegreeEstimate estimate_degree(const OperatorPair& pair, const std::vector<double>& schedule,
                               const std::vector<Vector>& probes, const DegreeOptions& options) {
  return estimate_degree_from_symbol(pair.kind(), pair.main(), symbol(pair), schedule, probes,
                                     options);
}

nlohmann::json to_json(const DegreeEstimate& est) {
  nlohmann::json j;
  j["format"] = "cmix.degree_estimate";
  j["version"] = 1;
  j["kind"] = to_string(est.kind);
  j["schedule"] = est.schedule;
  j["limit"] = matrix_to_json(est.limit);
  j["cauchy_gaps"] = est.cauchy_gaps;
  j["probe_residuals"] = est.probe_residuals;
  nlohmann::json quad = nlohmann::json::array();
  for (const auto& q : est.quadrature) {
    quad.push_back({{"t", q.t}, {"error_estimate", q.error_estimate}, {"nodes", q.nodes}});
  }
  j["quadrature"] = std::move(quad);
  j["flags"] = {{"settled", est.settled},
                {"diverging", est.diverging},
                {"reference_used", est.reference_used}};
  j["thresholds"] = {{"cauchy_threshold", est.cauchy_threshold},
                     {"cauchy_window", "last third of the schedule"},
                     {"note", "strong limit surrogate: Cauchy gaps plus probe residual decay"}};
  if (!est.averages.empty()) {
    nlohmann::json avg = nlohmann::json::array();
    for (const Matrix& m : est.averages) avg.push_back(matrix_to_json(m));
    j["averages"] = std::move(avg);
  }
  return j;
}

Matrix regularized_conjugate(const Matrix& a, double eps) {
  if (eps == 0.0 || !std::isfinite(eps)) {
    throw ArgumentError("regularized_conjugate: eps must be a nonzero real");
  }
  require_structure(a, StructureKind::hermitian, 1e-10, "regularized_conjugate: A");
  // (e^{i eps l} - 1)/(i eps) = sin(eps l)/eps + 2i sin^2(eps l / 2)/eps
  return functional_calculus(decompose(a), [eps](Complex l) {
    const double x = eps * l.real();
    const double half = std::sin(0.5 * x);
    return Complex(std::sin(x) / eps, 2.0 * half * half / eps);
  });
}

Matrix epsilon_commutator(const Matrix& s, const Matrix& a, double eps) {
  require_same_dim(s, a, "epsilon_commutator");
  const Matrix a_eps = regularized_conjugate(a, eps);
  return kI * commutator(s, a_eps);
}

EpsilonStudy epsilon_convergence(const Matrix& s, const Matrix& a,
                                 const std::vector<double>& eps_values) {
  if (eps_values.size() < 2) throw ArgumentError("epsilon_convergence: need >= 2 eps values");
  const Matrix exact = kI * commutator(s, a);
  EpsilonStudy study;
  std::vector<double> lx, ly;
  for (double eps : eps_values) {
    const double err = op_norm(epsilon_commutator(s, a, eps) - exact);
    study.eps.push_back(eps);
    study.errors.push_back(err);
    if (err > 0.0) {
      lx.push_back(std::log(std::abs(eps)));
      ly.push_back(std::log(err));
    }
  }
  study.slope = lx.size() >= 2 ? least_squares_slope(lx, ly) : 0.0;
  return study;
}

double smoothstep(double x, int order) {
  if (order < 1 || order % 2 == 0) throw ArgumentError("smoothstep: order must be odd >= 1");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const int n = (order - 1) / 2;
  auto binom = [](int top, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (top - k + i) / i;
    return r;
  };
  double sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    sum += binom(n + k, k) * binom(2 * n + 1, n - k) * std::pow(-x, k);
  }
  return std::pow(x, n + 1) * sum;
}

SmoothWindow::SmoothWindow(double a, double b, int order, double ramp)
    : a_(a), b_(b), order_(order), ramp_(ramp) {
  if (!(a < b)) throw ArgumentError("SmoothWindow: need a < b");
  if (a <= 0.0 && b >= 0.0) {
    throw ArgumentError("SmoothWindow: support must stay away from 0");
  }
  if (order < 1 || order % 2 == 0) throw ArgumentError("SmoothWindow: order must be odd >= 1");
  if (!(ramp > 0.0 && ramp <= 0.5)) throw ArgumentError("SmoothWindow: ramp in (0, 0.5]");
}

double SmoothWindow::operator()(double x) const {
  const double w = ramp_ * (b_ - a_);
  return smoothstep((x - a_) / w, order_) * smoothstep((b_ - x) / w, order_);
}

Matrix plateau_projector(const Matrix& d, const SmoothWindow& window) {
  const SpectralDecomposition dec = decompose(d);
  return spectral_projector(dec,
                            SpectralSet([&window](Complex z) { return window.on_plateau(z.real()); },
                                        [&window](Complex z) {
                                          return std::min(std::abs(z.real() - window.plateau_lo()),
                                                          std::abs(z.real() - window.plateau_hi()));
                                        },
                                        "plateau"),
                            0.0)
      .projector;
}

MixingBound mixing_bound(const OperatorPair& pair, const Matrix& d, const SmoothWindow& window,
                         const Vector& phi, const Vector& psi, std::size_t n) {
  if (pair.kind() != FlowKind::discrete) throw ArgumentError("mixing_bound: pair must be discrete");
  if (n == 0) throw ArgumentError("mixing_bound: N must be >= 1");
  require_same_dim(pair.main(), d, "mixing_bound");
  if (phi.size() != pair.dim() || psi.size() != pair.dim()) {
    throw DimensionError("mixing_bound: vector dimension");
  }
  require_structure(d, StructureKind::hermitian, 1e-9, "mixing_bound: D");

  const SpectralDecomposition d_dec = decompose(d);
  const Matrix eta_d =
      functional_calculus(d_dec, [&window](Complex l) { return Complex(window(l.real()), 0.0); });
  if ((eta_d * phi - phi).norm() > 1e-8 * std::max(1.0, phi.norm())) {
    throw ArgumentError("mixing_bound: phi must satisfy eta(D) phi = phi");
  }
  const Matrix d_inv_eta = functional_calculus(d_dec, [&window](Complex l) {
    const double e = window(l.real());
    return e == 0.0 ? Complex(0.0) : Complex(e / l.real(), 0.0);
  });

  const Matrix& u = pair.main();
  const Matrix& a = pair.conjugate();
  const Matrix d_n = birkhoff_discrete(u, unitary_symbol(pair), n);
  const Vector u_n_psi = matrix_power(u, n) * psi;
  const Vector chi = d_inv_eta * phi;
  const double nd = static_cast<double>(n);

  MixingBound out;
  out.n = n;
  out.lhs = std::abs(phi.dot(u_n_psi));
  out.limit_term = ((d_n - d) * chi).norm() * psi.norm();
  out.a_phi_term = (a * chi).norm() * psi.norm() / nd;
  out.a_psi_term = chi.norm() * (a * psi).norm() / nd;
  out.rhs = out.limit_term + out.a_phi_term + out.a_psi_term;
  out.holds = out.lhs <= out.rhs + 1e-9;
  return out;
}

}  // namespace cmix
