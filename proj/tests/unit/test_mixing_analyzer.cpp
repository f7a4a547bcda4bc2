#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "cmix/errors.hpp"
#include "cmix/mixing_analyzer.hpp"
#include "test_support.hpp"

using namespace cmix;

namespace {

CorrelationSeries discrete_series(std::size_t n, const std::function<Complex(double)>& c) {
  std::vector<double> x;
  std::vector<Complex> v;
  for (std::size_t k = 1; k <= n; ++k) {
    x.push_back(static_cast<double>(k));
    v.push_back(c(static_cast<double>(k)));
  }
  return CorrelationSeries::from_values(FlowKind::discrete, x, v);
}

Complex bump_coefficient_oracle(long n, double center, double hw, std::size_t points) {
  // (1/2pi) int g(e^{i theta}) e^{-i n theta} d theta by the plain trapezoid sum
  Complex acc = 0.0;
  for (std::size_t j = 0; j < points; ++j) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(points);
    double delta = std::remainder(th - center, 2.0 * std::numbers::pi);
    const double x = delta / hw;
    const double g = std::abs(x) < 1.0 ? std::pow(1.0 - x * x, 4) : 0.0;
    acc += g * std::exp(-kI * static_cast<double>(n) * th);
  }
  return acc / static_cast<double>(points);
}

}  // namespace

TEST_SUITE("mixing_analyzer") {

TEST_CASE("correlations match direct evaluation") {
  Rng rng(1);
  const Matrix u = random_unitary(6, rng);
  const Matrix h = random_hermitian(6, rng);
  const Vector phi = random_unit_vector(6, rng), psi = random_unit_vector(6, rng);
  const CorrelationSeries sd = correlation_discrete(u, phi, psi, 30);
  REQUIRE(sd.size() == 30);
  for (std::size_t n : {1u, 9u, 30u}) {
    CHECK(std::abs(sd.values[n - 1] - phi.dot(test::naive_power(u, n) * psi)) < 1e-12);
    CHECK(sd.abscissae[n - 1] == static_cast<double>(n));
  }
  const std::vector<double> times = {0.25, 1.0, 4.0};
  const CorrelationSeries sc = correlation_continuous(h, phi, psi, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK(std::abs(sc.values[k] - phi.dot(test::expm(-kI * times[k] * h) * psi)) < 1e-11);
  }
}

TEST_CASE("partial sums: running sum and trapezoid") {
  const CorrelationSeries d = discrete_series(4, [](double n) { return Complex(n, 0.0); });
  CHECK(d.partial_l2 == std::vector<double>{1.0, 5.0, 14.0, 30.0});
  const CorrelationSeries c = CorrelationSeries::from_values(
      FlowKind::continuous, {0.0, 1.0, 3.0}, {Complex(1.0), Complex(0.0, 1.0), Complex(1.0)});
  // |c|^2 = 1 throughout
  CHECK(c.partial_l2[0] == 0.0);
  CHECK(c.partial_l2[1] == doctest::Approx(1.0));
  CHECK(c.partial_l2[2] == doctest::Approx(3.0));
}

TEST_CASE("summability of 1/N correlations") {
  const CorrelationSeries s = discrete_series(3000, [](double n) { return Complex(1.0 / n, 0.0); });
  const SummabilityReport r = summability_report(s);
  CHECK(r.saturating);
  CHECK_FALSE(r.linear_growth);
  CHECK(r.tail_slope == doctest::Approx(-2.0).epsilon(0.02));
  CHECK(r.extrapolated_total == doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0).epsilon(1e-5));
  CHECK(r.total < r.extrapolated_total);
}

TEST_CASE("non-decaying correlations grow linearly") {
  const CorrelationSeries s = discrete_series(600, [](double n) { return std::polar(0.7, 0.3 * n); });
  const SummabilityReport r = summability_report(s);
  CHECK_FALSE(r.saturating);
  CHECK(r.linear_growth);
  CHECK(std::isinf(r.extrapolated_total));
  CHECK(r.total == doctest::Approx(600 * 0.49));
  const DecayReport d = decay_report(s, 0.1);
  CHECK_FALSE(d.decayed);
}

TEST_CASE("vanishing tail") {
  const CorrelationSeries s = discrete_series(90, [](double n) { return n < 5 ? Complex(1.0) : Complex(0.0); });
  const SummabilityReport r = summability_report(s);
  CHECK(r.saturating);
  CHECK(r.extrapolated_total == r.total);
  CHECK(r.total == 4.0);
  CHECK(std::isinf(r.tail_slope));
  const auto j = to_json(r);
  CHECK(j.at("tail_slope").is_null());
}

TEST_CASE("decay report compares quarters") {
  const CorrelationSeries s = discrete_series(400, [](double n) { return std::exp(-n / 10.0); });
  const DecayReport d = decay_report(s, 0.1);
  CHECK(d.decayed);
  CHECK(d.early_max == doctest::Approx(std::exp(-0.1)));
  CHECK(d.late_max == doctest::Approx(std::exp(-301.0 / 10.0)).epsilon(1e-6));
}

TEST_CASE("eigenpairs of the perp compression") {
  RealVector ev(4);
  ev << 0.0, 0.0, 1.0, -3.0;
  Rng rng(2);
  const Matrix v = random_unitary(4, rng);
  const Matrix d = v * ev.cast<Complex>().asDiagonal() * v.adjoint();
  const KernelSplit ks = kernel_split(d, 1e-8);
  REQUIRE(ks.kernel_dim == 2);
  const PerpEigenReport r = eigen_in_perp(d, ks);
  CHECK(r.perp_dim == 2);
  REQUIRE(r.pairs.size() == 2);
  CHECK(r.min_residual < 1e-12);
  std::vector<double> got = {r.pairs[0].eigenvalue.real(), r.pairs[1].eigenvalue.real()};
  std::sort(got.begin(), got.end());
  CHECK(got[0] == doctest::Approx(-3.0));
  CHECK(got[1] == doctest::Approx(1.0));
  for (std::size_t i = 1; i < r.pairs.size(); ++i) CHECK(r.pairs[i - 1].residual <= r.pairs[i].residual);
}

TEST_CASE("arc bump") {
  CHECK(arc_bump(Complex(1.0, 0.0), 0.0, 1.0).real() == 1.0);
  CHECK(arc_bump(std::polar(1.0, 1.5), 0.0, 1.0).real() == 0.0);
  CHECK(arc_bump(std::polar(1.0, 0.5), 0.0, 1.0).real() == doctest::Approx(std::pow(0.75, 4)));
  CHECK(arc_bump(std::polar(1.0, 0.5), 0.0, 1.0) == arc_bump(std::polar(1.0, -0.5), 0.0, 1.0));
  // wraps around the branch cut
  CHECK(arc_bump(std::polar(1.0, -3.0), 3.0, 0.5).real() > 0.0);
}

TEST_CASE("Fourier calculus of a C3 bump") {
  Rng rng(3);
  const Matrix u = random_unitary(16, rng);
  const FourierCalculus fc = fourier_calculus(
      u, [](Complex z) { return arc_bump(z, 0.0, 1.0); }, 512, 0.5);
  CHECK(fc.reconstruction_error <= 1e-8);
  CHECK(fc.fit_exponent <= -2.0);
  CHECK(fc.grid == 4096);
  CHECK(fc.coefficients.size() == 2 * 512 + 1);
  for (long n : {0L, 1L, 2L, 7L, -7L, 40L}) {
    CHECK(std::abs(fc.coefficient(n) - bump_coefficient_oracle(n, 0.0, 1.0, 1 << 16)) < 1e-12);
  }
  CHECK(fc.tail_bound > 0.0);
  std::ostringstream os;
  write_csv(os, fc);
  CHECK(os.str().rfind("#", 0) == 0);
}

TEST_CASE("Fourier calculus of a trigonometric polynomial is exact") {
  Rng rng(4);
  const Matrix u = random_unitary(5, rng);
  const FourierCalculus fc = fourier_calculus(u, [](Complex z) { return z * z + 0.5 / z; }, 8, 0.5);
  CHECK(std::abs(fc.coefficient(2) - 1.0) < 1e-14);
  CHECK(std::abs(fc.coefficient(-1) - 0.5) < 1e-14);
  CHECK(std::abs(fc.coefficient(0)) < 1e-14);
  CHECK(fc.reconstruction_error < 1e-12);
}

TEST_CASE("under-resolved functions are rejected") {
  Rng rng(5);
  const Matrix u = random_unitary(4, rng);
  auto indicator = [](Complex z) { return std::abs(std::arg(z)) < 1.0 ? Complex(1.0) : Complex(0.0); };
  CHECK_THROWS_AS(fourier_calculus(u, indicator, 64, 0.5), ResolutionError);
  FourierOptions small;
  small.grid = 64;
  CHECK_THROWS_AS(fourier_calculus(u, [](Complex z) { return z; }, 32, 0.5, small), ArgumentError);
}

TEST_CASE("series CSV layout") {
  const CorrelationSeries s = discrete_series(3, [](double n) { return Complex(n, -n); });
  std::ostringstream os;
  write_csv(os, s);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# cmix.series v1", 0) == 0);
  std::getline(in, line);
  CHECK(line == "abscissa,re,im,abs,partial_l2");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
}

}
