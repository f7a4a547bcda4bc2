#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cmix/errors.hpp"
#include "cmix/random.hpp"
#include "cmix/skew_products.hpp"
#include "test_support.hpp"

using namespace cmix;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

std::vector<EtaTerm> eta_sine(double amp, std::size_t component = 0) {
  return {{{1}, Complex(0.0, -amp / 2.0), component}, {{-1}, Complex(0.0, amp / 2.0), component}};
}

TorusCocycle case1_cocycle(long b, long q, double amp) { return TorusCocycle({{b}}, eta_sine(amp), {q}); }

// Direct sum q.phi(x + k y) over k < n.
double cocycle_oracle(long b, long q, double amp, double y, double x, long n) {
  double s = 0.0;
  for (long k = 0; k < n; ++k) {
    const double xk = x + static_cast<double>(k) * y;
    s += static_cast<double>(q) * (static_cast<double>(b) * xk + amp * std::sin(kTwoPi * xk));
  }
  return s;
}

Complex phase_distance(double a, double b) {
  return std::polar(1.0, kTwoPi * a) - std::polar(1.0, kTwoPi * b);
}

Matrix random_su2(Rng& rng) {
  Matrix g = random_unitary(2, rng);
  const Complex det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
  return g / std::sqrt(det);
}

TrigPolynomial shipped_f() {
  return TrigPolynomial(1, {{{0}, Complex(1.0)}, {{1}, Complex(0.25)}, {{-1}, Complex(0.25)},
                            {{2}, Complex(0.0, -0.125)}, {{-2}, Complex(0.0, 0.125)}});
}

}  // namespace

TEST_SUITE("skew_products") {

TEST_CASE("rational proximity by continued fractions") {
  const RationalProximity g = rational_proximity(kGolden);
  for (std::size_t i = 1; i < g.partial_quotients.size(); ++i) CHECK(g.partial_quotients[i] == 1);
  CHECK(g.denominator <= 10000);
  CHECK(g.denominator == 6765);  // Fibonacci convergent
  CHECK_FALSE(g.near_rational);
  const RationalProximity t = rational_proximity(1.0 / 3.0);
  CHECK(t.numerator == 1);
  CHECK(t.denominator == 3);
  CHECK(t.near_rational);
  CHECK(TorusFlow({0.5}).near_rational());
  CHECK_FALSE(TorusFlow({kGolden, std::sqrt(2.0) - 1.0}).near_rational());
  CHECK_THROWS_AS(TorusFlow({1.2}), ArgumentError);
  CHECK_THROWS_AS(TorusFlow({0.0}), ArgumentError);
  CHECK_THROWS_AS(TorusFlow({}), ArgumentError);
}

TEST_CASE("flow step reduces mod 1") {
  const TorusFlow flow({kGolden});
  const Point x = flow_step(flow, {0.9}, 3.0);
  CHECK(x[0] >= 0.0);
  CHECK(x[0] < 1.0);
  CHECK(x[0] == doctest::Approx(std::fmod(0.9 + 3.0 * kGolden, 1.0)));
}

TEST_CASE("cocycle validation") {
  CHECK_THROWS_AS(TorusCocycle({{2}}, {{{1}, Complex(0.0, -0.1), 0}}, {3}), StructureError);
  CHECK_THROWS_AS(TorusCocycle({{2}}, eta_sine(0.1, 1), {3}), DimensionError);
  CHECK_THROWS_AS(TorusCocycle({{2}}, eta_sine(0.1), {3, 1}), DimensionError);
  const TorusCocycle c({{2, 1}, {0, 3}}, {}, {3, -1});
  CHECK(c.winding() == std::vector<long>{6, 0});  // B^T q
  CHECK(c.base_dims() == 2);
  CHECK(c.target_dims() == 2);
}

TEST_CASE("cocycle sum matches the direct sum") {
  const TorusFlow flow({kGolden});
  const TorusCocycle c = case1_cocycle(2, 3, 0.05);
  for (double x : {0.0, 0.137, 0.77}) {
    for (long n : {1L, 2L, 7L, 100L}) {
      const double oracle = cocycle_oracle(2, 3, 0.05, kGolden, x, n);
      CHECK(cocycle_sum(c, flow, {x}, n) == doctest::Approx(oracle).epsilon(1e-11));
      CHECK(std::abs(phase_distance(cocycle_phase(c, flow, {x}, n), oracle)) < 1e-9);
    }
  }
  CHECK(cocycle_sum(c, flow, {0.3}, 0) == 0.0);
}

TEST_CASE("cocycle law phi(n+m)(x) = phi(n)(x) + phi(m)(x + n y) (property)") {
  Rng rng(11);
  const TorusFlow flow({kGolden, std::sqrt(2.0) - 1.0});
  const TorusCocycle c({{2, 1}, {-1, 4}}, {{{1, 0}, Complex(0.0, -0.02), 0}, {{-1, 0}, Complex(0.0, 0.02), 0},
                                           {{1, 1}, Complex(0.03), 1}, {{-1, -1}, Complex(0.03), 1}},
                       {3, 2});
  for (int trial = 0; trial < 200; ++trial) {
    const Point x = {rng.uniform(), rng.uniform()};
    const long n = static_cast<long>(rng.next() % 81) - 40;
    const long m = static_cast<long>(rng.next() % 81) - 40;
    const Point xn = {x[0] + n * flow.y()[0], x[1] + n * flow.y()[1]};
    const double lhs = cocycle_sum(c, flow, x, n + m);
    const double rhs = cocycle_sum(c, flow, x, n) + cocycle_sum(c, flow, xn, m);
    CHECK(std::abs(lhs - rhs) <= 1e-10);
    const double plhs = cocycle_phase(c, flow, x, n + m);
    const double prhs = cocycle_phase(c, flow, x, n) + cocycle_phase(c, flow, xn, m);
    CHECK(std::abs(phase_distance(plhs, prhs)) <= 1e-9);
  }
}

TEST_CASE("sector operator: closed form and composition") {
  const TorusFlow flow({kGolden});
  const TorusCocycle c = case1_cocycle(2, 3, 0.05);
  const Shape grid = {64};
  const TrigPolynomial f = shipped_f();
  const GridField fg = f.sampled(grid);
  for (long n : {1L, 5L, -3L}) {
    const GridField u = sector_apply(c, flow, fg, n);
    for (std::size_t i = 0; i < u.size(); i += 7) {
      const double x = u.point(i)[0];
      const double ph = n > 0 ? cocycle_oracle(2, 3, 0.05, kGolden, x, n)
                              : -cocycle_oracle(2, 3, 0.05, kGolden, x + n * kGolden, -n);
      const Complex expect = std::polar(1.0, kTwoPi * ph) * f({x + n * kGolden});
      CHECK(std::abs(u[i] - expect) < 1e-9);
    }
  }
  // U^2 U^1 = U^3 whenever the intermediate field stays in band.
  const GridField fine = f.sampled({128});
  for (const TorusCocycle& cc : {case1_cocycle(1, 1, 0.0), c}) {
    const GridField once = sector_apply(cc, flow, fine, 1);
    const GridField composed = sector_apply(cc, flow, once, 2);
    const GridField direct = sector_apply(cc, flow, fine, 3);
    for (std::size_t i = 0; i < fine.size(); ++i) CHECK(std::abs(composed[i] - direct[i]) < 1e-9);
    const GridField back = sector_apply(cc, flow, direct, -3);
    for (std::size_t i = 0; i < fine.size(); ++i) CHECK(std::abs(back[i] - fine[i]) < 1e-9);
  }
  const GridField rough = GridField::sample(grid, [](const Point& x) { return x[0] < 0.5 ? Complex(1.0) : Complex(0.0); });
  CHECK_THROWS_AS(sector_apply(c, flow, rough, 1), ResolutionError);
}

TEST_CASE("sector correlation: quadrature route against the matrix route") {
  const TorusFlow flow({kGolden});
  const TorusCocycle c = case1_cocycle(2, 1, 0.05);
  const Shape grid = {256};
  const TorusGridModel gm = torus_grid_model(c, flow, grid);
  const TrigPolynomial f = shipped_f();
  const GridField fg = f.sampled(grid);
  Vector v(static_cast<Eigen::Index>(fg.size()));
  for (std::size_t i = 0; i < fg.size(); ++i) v(static_cast<Eigen::Index>(i)) = fg[i];
  Vector w = v;
  for (long n = 1; n <= 20; ++n) {
    w = gm.u * w;
    const Complex matrix_route = v.dot(w) / static_cast<double>(fg.size());
    CHECK(std::abs(sector_correlation(c, flow, f, f, n) - matrix_route) <= 1e-8);
  }
  CHECK_THROWS_AS(sector_correlation(c, flow, f, f, 5000, 1024), ResolutionError);
}

TEST_CASE("torus grid model structure and symbol") {
  const TorusFlow flow({kGolden});
  const TorusCocycle c = case1_cocycle(2, 3, 0.02);
  const TorusGridModel gm = torus_grid_model(c, flow, {64});
  CHECK(check_structure(gm.u, StructureKind::unitary, 1e-12).pass);
  CHECK(check_structure(gm.a, StructureKind::hermitian, 1e-12).pass);
  // [A,U]U^{-1} acts as the symbol on low-frequency vectors.
  const Matrix comm = (gm.a * gm.u - gm.u * gm.a) * gm.u.adjoint();
  const GridField lowf = TrigPolynomial(1, {{{0}, Complex(1.0)}, {{1}, Complex(0.3)}}).sampled({64});
  Vector v(64);
  for (std::size_t i = 0; i < 64; ++i) v(static_cast<Eigen::Index>(i)) = lowf[i];
  // U^{-1} v stays low-frequency up to the phase bandwidth.
  CHECK(((comm - gm.symbol) * v).norm() / v.norm() < 1e-8);
  CHECK(std::abs(gm.symbol.diagonal().real().mean() - kTwoPi * 6.0 * kGolden) < 1e-12);
}

TEST_CASE("case 1 degree: limit, oracle field and monotone decay") {
  const TorusFlow flow({kGolden});
  const TorusCocycle c = case1_cocycle(2, 3, 0.05);
  const double limit = kTwoPi * kGolden * 6.0;
  std::vector<double> errs;
  for (std::size_t n = 2; n <= 1024; n *= 2) {
    const Case1Degree d = case1_degree(c, flow, {256}, n);
    CHECK(d.limit == doctest::Approx(limit).epsilon(1e-14));
    errs.push_back(d.sup_error);
    if (n == 8) {
      for (std::size_t i = 0; i < 256; i += 17) {
        const double x = d.field.point(i)[0];
        double s = 0.0;  // (1/N) sum_k 2 pi y d/dx(3 * 0.05 sin(2 pi x))
        for (std::size_t k = 0; k < n; ++k) s += kGolden * 3.0 * 0.05 * kTwoPi * std::cos(kTwoPi * (x + k * kGolden));
        CHECK(d.field[i].real() == doctest::Approx(limit + kTwoPi * s / n).epsilon(1e-12));
      }
    }
  }
  // nonincreasing along the dyadic schedule
  for (std::size_t i = 1; i < errs.size(); ++i) CHECK(errs[i] <= errs[i - 1] + 1e-15);
  CHECK(errs.back() <= 0.05);
  // Rounded value quoted for this example; the closed form is exact.
  CHECK(std::abs(limit - 23.3006) < 2e-3);
  const Case1Degree flat = case1_degree(case1_cocycle(2, 3, 0.0), flow, {32}, 50);
  CHECK(flat.sup_error < 1e-12);
}

TEST_CASE("SU(2) irreps: homomorphism, unitarity, character") {
  Rng rng(21);
  for (std::size_t n = 0; n <= 5; ++n) {
    const Matrix g = random_su2(rng), h = random_su2(rng);
    const Matrix pg = su2_irrep(n, g), ph = su2_irrep(n, h);
    CHECK(pg.rows() == static_cast<Eigen::Index>(n + 1));
    CHECK(max_norm(pg * ph - su2_irrep(n, g * h)) < 1e-12);
    CHECK(max_norm(pg.adjoint() * pg - Matrix::Identity(n + 1, n + 1)) < 1e-12);
    const double alpha = 0.37;
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = std::polar(1.0, alpha);
    d(1, 1) = std::polar(1.0, -alpha);
    const Complex chi = su2_irrep(n, d).trace();
    CHECK(std::abs(chi - std::sin((n + 1) * alpha) / std::sin(alpha)) < 1e-12);
    // the character is a class function
    CHECK(std::abs(su2_irrep(n, g * d * g.adjoint()).trace() - chi) < 1e-12);
  }
  Matrix bad = Matrix::Identity(2, 2) * Complex(0.0, 1.0);  // det = -1
  CHECK_THROWS_AS(su2_irrep(2, bad), StructureError);
  CHECK_FALSE(is_special_unitary(bad, 1e-10));
}

TEST_CASE("SU(2) cocycle validation") {
  const TrigPolynomial eta(1, {{{1}, Complex(0.0, -0.025)}, {{-1}, Complex(0.0, 0.025)}});
  CHECK_THROWS_AS(SU2Cocycle(Matrix::Identity(2, 2) * 2.0, {1}, eta, 2), StructureError);
  CHECK_THROWS_AS(SU2Cocycle(Matrix::Identity(2, 2), {0}, eta, 2), ArgumentError);
  const TrigPolynomial complex_eta(1, {{{1}, Complex(0.1)}});
  CHECK_THROWS_AS(SU2Cocycle(Matrix::Identity(2, 2), {1}, complex_eta, 2), StructureError);
  const SU2Cocycle c(Matrix::Identity(2, 2), {1}, eta, 1);
  CHECK(is_special_unitary(c.value({0.3}), 1e-12));
  CHECK(c.theta({0.25}) == doctest::Approx(0.25 + 0.05));
}

TEST_CASE("case 2 degree: diagonal cocycle is exact") {
  const TorusFlow flow({kGolden});
  const SU2Cocycle c(Matrix::Identity(2, 2), {1}, TrigPolynomial(1, {}), 3);
  const Case2Degree d = case2_degree(c, flow, {16}, 40);
  Matrix expect = Matrix::Zero(4, 4);
  for (int k = 0; k <= 3; ++k) expect(k, k) = kTwoPi * kGolden * (2 * k - 3);
  for (const Matrix& v : d.field.values) CHECK(max_norm(v - expect) < 1e-12);
  CHECK(d.max_relative_error < 1e-13);
  CHECK(d.kernel_dim == 0);
}

TEST_CASE("case 2 degree: equivariance under conjugation of h") {
  Rng rng(31);
  const TorusFlow flow({kGolden});
  const TrigPolynomial eta(1, {{{1}, Complex(0.0, -0.025)}, {{-1}, Complex(0.0, 0.025)}});
  const Matrix h = random_su2(rng), g = random_su2(rng);
  for (std::size_t n : {1u, 2u}) {
    const Case2Degree d1 = case2_degree(SU2Cocycle(h, {1}, eta, n), flow, {16}, 30);
    const Case2Degree d2 = case2_degree(SU2Cocycle(g * h, {1}, eta, n), flow, {16}, 30);
    const Matrix pg = su2_irrep(n, g);
    for (std::size_t i = 0; i < d1.field.size(); ++i) {
      CHECK(max_norm(d2.field.values[i] - pg * d1.field.values[i] * pg.adjoint()) < 1e-10);
    }
    // right multiplication by a diagonal element leaves phi unchanged
    Matrix t = Matrix::Zero(2, 2);
    t(0, 0) = std::polar(1.0, 0.8);
    t(1, 1) = std::polar(1.0, -0.8);
    const Case2Degree d3 = case2_degree(SU2Cocycle(h * t, {1}, eta, n), flow, {16}, 30);
    CHECK((d3.eigenvalues - d1.eigenvalues).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("case 2 degree: kernel parity with a generic h") {
  Rng rng(41);
  const TorusFlow flow({kGolden});
  const TrigPolynomial eta(1, {{{1}, Complex(0.0, -0.025)}, {{-1}, Complex(0.0, 0.025)}});
  const Matrix h = random_su2(rng);
  for (std::size_t n = 1; n <= 4; ++n) {
    const Case2Degree d = case2_degree(SU2Cocycle(h, {1}, eta, n), flow, {64}, 400);
    CHECK(d.max_relative_error < 2e-2);
    CHECK(d.kernel_dim == (n % 2 == 0 ? 1u : 0u));
  }
}

TEST_CASE("case 3 R-set membership") {
  const Point y = {kGolden};
  // b+ = 3, b- = 1: min_k |3(2m-n) + (2k-n)| y
  const RMembership r = case3_R_membership(1, 2, {2}, {1}, y);
  CHECK(r.infimum < 1e-15);  // (2m-n) = 0 and k = 1 cancel
  CHECK(r.argmin_k == 1);
  CHECK_FALSE(r.member);
  const RMembership s = case3_R_membership(2, 2, {2}, {1}, y);
  CHECK(s.member);
  CHECK(s.infimum == doctest::Approx(kGolden * 4.0));
  CHECK(s.argmin_k == 0);
  CHECK_THROWS_AS(case3_R_membership(0, -1, {1}, {1}, y), ArgumentError);
}

TEST_CASE("shift window: interior symbol is the identity") {
  for (std::size_t margin = 0; margin <= 3; ++margin) {
    const ShiftWeylModel m = shift_weyl_model(16, margin);
    const Matrix s = unitary_symbol(m.pair);
    const std::size_t lo = std::max<std::size_t>(margin, 1);
    CHECK(m.interior.front() == lo);
    CHECK(m.interior.back() == 16 - lo - 1);
    for (std::size_t i : m.interior) {
      for (Eigen::Index j = 0; j < 16; ++j) {
        CHECK(std::abs(s(static_cast<Eigen::Index>(i), j) - (static_cast<Eigen::Index>(i) == j ? 1.0 : 0.0)) < 1e-12);
      }
    }
    CHECK(std::abs(s(0, 0) - 1.0) > 0.5);  // wrap row
  }
  CHECK_THROWS_AS(shift_weyl_model(1, 0), ArgumentError);
  CHECK_THROWS_AS(shift_weyl_model(8, 4), ArgumentError);
}

}
