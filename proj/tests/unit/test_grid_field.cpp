#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cmix/errors.hpp"
#include "cmix/grid_field.hpp"

using namespace cmix;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Complex plane_wave(const Point& x, const std::vector<int>& k) {
  double ph = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) ph += k[a] * x[a];
  return std::polar(1.0, kTwoPi * ph);
}
}  // namespace

TEST_SUITE("grid_field") {

TEST_CASE("shapes and lattice points") {
  CHECK_NOTHROW(validate_shape({8, 16}));
  CHECK_THROWS_AS(validate_shape({}), ArgumentError);
  CHECK_THROWS_AS(validate_shape({12}), ArgumentError);
  CHECK_THROWS_AS(validate_shape({1}), ArgumentError);
  CHECK(flat_size({4, 8}) == 32);
  const GridField f({4, 8});
  // row-major: last axis fastest
  CHECK(f.point(1) == Point{0.0, 0.125});
  CHECK(f.point(8) == Point{0.25, 0.0});
  CHECK(signed_frequency(0, 8) == 0);
  CHECK(signed_frequency(3, 8) == 3);
  CHECK(signed_frequency(5, 8) == -3);
  CHECK_THROWS_AS(GridField({4}, std::vector<Complex>(3)), DimensionError);
}

TEST_CASE("coefficients of plane waves") {
  const Shape s = {16, 8};
  const GridField f = GridField::sample(s, [](const Point& x) { return 2.0 * plane_wave(x, {3, -2}); });
  const std::vector<Complex> c = forward_coefficients(f);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const long k0 = signed_frequency(i / 8, 16), k1 = signed_frequency(i % 8, 8);
    const Complex expect = (k0 == 3 && k1 == -2) ? Complex(2.0) : Complex(0.0);
    CHECK(std::abs(c[i] - expect) < 1e-13);
  }
  const GridField back = from_coefficients(s, c);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(back[i] - f[i]) < 1e-13);
  CHECK(f.sup_norm() == doctest::Approx(2.0));
  CHECK(std::abs(f.mean()) < 1e-14);
}

TEST_CASE("shift and derivative act exactly on band-limited fields") {
  const Shape s = {32};
  const TrigPolynomial p(1, {{{1}, Complex(0.3, 0.1)}, {{-4}, Complex(1.0)}, {{0}, Complex(2.0)}});
  const GridField f = p.sampled(s);
  const double shift = 1234.5678;  // large shifts are reduced exactly
  const GridField g = shifted(f, {shift});
  const GridField d = directional_derivative(f, {0.7});
  const TrigPolynomial dp = p.derivative({0.7});
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Point x = f.point(i);
    CHECK(std::abs(g[i] - p({x[0] + shift})) < 1e-10);
    CHECK(std::abs(d[i] - dp(x)) < 1e-12);
  }
  CHECK(outer_band_energy(f) < 1e-28);
  CHECK_NOTHROW(require_band_limited(f, "f"));
  const GridField rough = GridField::sample(s, [](const Point& x) { return x[0] < 0.5 ? Complex(1.0) : Complex(0.0); });
  CHECK(outer_band_energy(rough) > 1e-6);
  CHECK_THROWS_AS(require_band_limited(rough, "rough"), ResolutionError);
}

TEST_CASE("inner products of plane waves are orthonormal") {
  const Shape s = {8, 8};
  const GridField a = GridField::sample(s, [](const Point& x) { return plane_wave(x, {1, 2}); });
  const GridField b = GridField::sample(s, [](const Point& x) { return plane_wave(x, {-1, 2}); });
  CHECK(std::abs(inner(a, a) - 1.0) < 1e-14);
  CHECK(std::abs(inner(a, b)) < 1e-14);
  CHECK_THROWS_AS(inner(a, GridField({8})), DimensionError);
}

TEST_CASE("trigonometric polynomial bookkeeping") {
  const TrigPolynomial p(2, {{{1, 0}, Complex(0.0, -0.5)}, {{-1, 0}, Complex(0.0, 0.5)},
                             {{1, 0}, Complex(0.0, -0.5)}, {{0, 3}, Complex(0.25)}});
  // repeated frequencies merge
  CHECK(p.terms().size() == 3);
  CHECK(p.terms().at({1, 0}) == Complex(0.0, -1.0));
  CHECK(p.bandwidth() == 3);
  CHECK(p.l2_norm_sq() == doctest::Approx(1.0 + 0.25 + 0.0625));
  CHECK(p.coefficient_l1() == doctest::Approx(1.75));
  CHECK(p.hermitian_defect() == doctest::Approx(0.5));  // (1,0) vs conj of (-1,0), and the lone (0,3)
  const TrigPolynomial sine(1, {{{1}, Complex(0.0, -0.5)}, {{-1}, Complex(0.0, 0.5)}});
  CHECK(sine.hermitian_defect() == 0.0);
  CHECK(sine({0.25}).real() == doctest::Approx(1.0));
  CHECK(std::abs(sine({0.25}).imag()) < 1e-15);
  CHECK_THROWS_AS(TrigPolynomial(2, {{{1}, Complex(1.0)}}), DimensionError);
  CHECK_THROWS_AS(sine({0.1, 0.2}), DimensionError);
}

}
