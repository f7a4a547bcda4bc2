#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cmix/errors.hpp"
#include "cmix/matrix_io.hpp"
#include "cmix/operator_core.hpp"
#include "cmix/random.hpp"
#include "test_support.hpp"

using namespace cmix;

namespace {

Matrix pauli(int k) {
  Matrix s(2, 2);
  if (k == 1) s << 0.0, 1.0, 1.0, 0.0;
  if (k == 2) s << 0.0, Complex(0, -1), Complex(0, 1), 0.0;
  if (k == 3) s << 1.0, 0.0, 0.0, -1.0;
  return s;
}

Matrix diag_phases(const std::vector<double>& theta) {
  Matrix u = Matrix::Zero(theta.size(), theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) u(k, k) = std::polar(1.0, theta[k]);
  return u;
}

}  // namespace

TEST_SUITE("operator_core") {

TEST_CASE("structure checks accept and reject") {
  Rng rng(1);
  const Matrix u = random_unitary(6, rng);
  const Matrix h = random_hermitian(6, rng);
  CHECK(check_structure(u, StructureKind::unitary, 1e-12).pass);
  CHECK(check_structure(h, StructureKind::hermitian, 1e-12).pass);
  CHECK_FALSE(check_structure(h, StructureKind::unitary, 1e-6).pass);
  Matrix skew = h;
  skew(0, 1) += 1e-3;
  const StructureReport r = check_structure(skew, StructureKind::hermitian, 1e-6);
  CHECK_FALSE(r.pass);
  CHECK(r.deviation == doctest::Approx(1e-3).epsilon(1e-6));
  CHECK_THROWS_AS(require_square(Matrix::Zero(2, 3), "x"), DimensionError);
  CHECK_THROWS_AS(require_same_dim(Matrix::Zero(2, 2), Matrix::Zero(3, 3), "x"), DimensionError);
}

TEST_CASE("norms and commutator against closed forms") {
  // [sx, sy] = 2i sz
  CHECK(max_norm(commutator(pauli(1), pauli(2)) - Complex(0, 2) * pauli(3)) == 0.0);
  Rng rng(2);
  const Matrix m = random_hermitian(9, rng) + kI * random_hermitian(9, rng);
  CHECK(op_norm(m) == doctest::Approx(test::spectral_norm(m)).epsilon(1e-12));
  CHECK(max_norm(m) == doctest::Approx(m.cwiseAbs().maxCoeff()).epsilon(1e-15));
  CHECK(max_norm(hermitian_part(m) - (m + m.adjoint()) / 2.0) < 1e-15);
}

TEST_CASE("resolvent inverts S - z") {
  Rng rng(3);
  const Matrix h = random_hermitian(8, rng);
  for (Complex z : {kI, -kI, Complex(0.3, 2.0)}) {
    const Matrix r = resolvent(h, z);
    CHECK(max_norm((h - z * identity_like(h)) * r - identity_like(h)) < 1e-12);
  }
}

TEST_CASE("decompose reconstructs normal matrices") {
  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix h = random_hermitian(10, rng);
    const SpectralDecomposition dh = decompose(h);
    CHECK(dh.hermitian);
    CHECK(dh.eigenvalues.imag().cwiseAbs().maxCoeff() == 0.0);
    const Matrix back = dh.eigenvectors * dh.eigenvalues.asDiagonal() * dh.eigenvectors.adjoint();
    CHECK(max_norm(back - h) < 1e-12);
    CHECK(dh.residual < 1e-12);

    const Matrix u = random_unitary(10, rng);
    const SpectralDecomposition du = decompose(u);
    CHECK_FALSE(du.hermitian);
    CHECK(max_norm(du.eigenvectors.adjoint() * du.eigenvectors - Matrix::Identity(10, 10)) < 1e-12);
    for (Eigen::Index k = 0; k < 10; ++k) CHECK(std::abs(du.eigenvalues(k)) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Degenerate eigenvalues keep a unitary basis.
  const Matrix deg = diag_phases({0.5, 0.5, 0.5, 2.0});
  CHECK(max_norm(decompose(deg).eigenvectors.adjoint() * decompose(deg).eigenvectors - Matrix::Identity(4, 4)) < 1e-12);
  Matrix jordan = Matrix::Zero(2, 2);
  jordan(0, 1) = 1.0;
  CHECK_THROWS_AS(decompose(jordan), StructureError);
}

TEST_CASE("functional calculus matches the Pade exponential") {
  Rng rng(5);
  const Matrix h = random_hermitian(12, rng);
  for (double t : {0.1, 1.0, 7.5}) {
    const Matrix f = functional_calculus(h, [t](Complex l) { return std::exp(-kI * t * l); });
    CHECK(max_norm(f - test::expm(-kI * t * h)) < 1e-11);
  }
  // g(U) = U^3 for a unitary
  const Matrix u = random_unitary(7, rng);
  CHECK(max_norm(functional_calculus(u, [](Complex z) { return z * z * z; }) - u * u * u) < 1e-12);
  Matrix singular = Matrix::Zero(2, 2);
  singular(1, 1) = 1.0;
  CHECK_THROWS_AS(functional_calculus(singular, [](Complex z) { return 1.0 / z; }), EvaluationError);
}

TEST_CASE("spectral projectors are orthogonal projectors of the right rank") {
  RealVector ev(5);
  ev << -2.0, -0.5, 0.5, 1.0, 3.0;
  Rng rng(6);
  const Matrix v = random_unitary(5, rng);
  const Matrix h = v * ev.cast<Complex>().asDiagonal() * v.adjoint();
  const SpectralProjection p = spectral_projector(h, SpectralSet::positive(), 1e-8);
  CHECK(p.rank == 3);
  CHECK(max_norm(p.projector * p.projector - p.projector) < 1e-12);
  CHECK(max_norm(p.projector - p.projector.adjoint()) < 1e-12);
  CHECK(std::abs(p.projector.trace() - 3.0) < 1e-12);
  const SpectralProjection q = spectral_projector(h, SpectralSet::positive().complement(), 1e-8);
  CHECK(max_norm(p.projector + q.projector - Matrix::Identity(5, 5)) < 1e-12);
  CHECK(spectral_projector(h, SpectralSet::open_interval(0.0, 2.0), 1e-8).rank == 2);
  CHECK(spectral_projector(h, SpectralSet::everything(), 1e-8).rank == 5);
  // An eigenvalue sitting on a cut is flagged.
  CHECK_FALSE(spectral_projector(h, SpectralSet::open_interval(1.0, 5.0), 1e-8).warnings.empty());
  // Arcs of the circle.
  const Matrix u = diag_phases({0.1, 1.0, 2.0, -0.2});
  CHECK(spectral_projector(u, SpectralSet::circle_arc(0.0, 0.5), 1e-8).rank == 2);
}

TEST_CASE("kernel split counts small eigenvalues and flags ambiguity") {
  Matrix d = Matrix::Zero(4, 4);
  d(1, 1) = 1e-13;
  d(2, 2) = 1.0;
  d(3, 3) = -2.0;
  const KernelSplit ks = kernel_split(d, 1e-6);
  CHECK(ks.kernel_dim == 2);
  CHECK(ks.threshold == doctest::Approx(2e-6));
  CHECK(max_norm(ks.kernel_projector + ks.perp_projector - Matrix::Identity(4, 4)) < 1e-14);
  CHECK(ks.warnings.empty());
  d(1, 1) = 5e-6;  // within a factor 10 of the threshold
  CHECK_FALSE(kernel_split(d, 1e-6).warnings.empty());
  d(0, 1) = 1.0;
  CHECK_THROWS_AS(kernel_split(d, 1e-6), StructureError);
}

TEST_CASE("Cayley transform against the cotangent formula") {
  const std::vector<double> theta = {0.4, 1.3, -2.2, 3.0};
  const Matrix u = diag_phases(theta);
  const Matrix h = cayley_transform(u);
  for (std::size_t k = 0; k < theta.size(); ++k) {
    CHECK(h(k, k).real() == doctest::Approx(-1.0 / std::tan(theta[k] / 2.0)).epsilon(1e-12));
    CHECK(std::abs(h(k, k).imag()) < 1e-14);
  }
  Rng rng(7);
  const Matrix w = random_unitary_away_from_one(8, rng, 0.1);
  const Matrix hw = cayley_transform(w);
  CHECK(check_structure(hw, StructureKind::hermitian, 1e-10).pass);
  CHECK(max_norm(inverse_cayley_transform(hw) - w) < 1e-11);
  CHECK_THROWS_AS(cayley_transform(diag_phases({0.0, 1.0})), SingularityError);
}

TEST_CASE("random generators are seeded and structured") {
  Rng a(42), b(42);
  const Matrix ua = random_unitary(5, a), ub = random_unitary(5, b);
  CHECK(max_norm(ua - ub) == 0.0);
  CHECK(check_structure(ua, StructureKind::unitary, 1e-12).pass);
  Rng c(9);
  const Matrix w = random_unitary_away_from_one(16, c, 0.1);
  const SpectralDecomposition dw = decompose(w);
  for (Eigen::Index k = 0; k < 16; ++k) CHECK(std::abs(dw.eigenvalues(k) - 1.0) >= 0.1 - 1e-12);
  CHECK(random_unit_vector(9, c).norm() == doctest::Approx(1.0));
}

TEST_CASE("matrix text format round-trips bit for bit") {
  Rng rng(10);
  const Matrix m = random_unitary(4, rng) * Complex(1.0 / 3.0, std::numbers::pi);
  const Matrix back = parse_matrix(dump_matrix(m));
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
  const Vector v = random_unit_vector(3, rng);
  CHECK((vector_from_json(vector_to_json(v)) - v).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(parse_matrix("{\"format\": \"cmix.matrix\", \"version\": 99, \"dim\": 1, \"entries\": [[1,0]]}"), ParseError);
  CHECK_THROWS_AS(parse_matrix("{\"format\": \"cmix.matrix\", \"version\": 1, \"dim\": 2, \"entries\": [[1,0]]}"), ParseError);
  CHECK_THROWS_AS(parse_matrix("not json"), ParseError);
}

}
