#include "cmix/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "cmix/errors.hpp"

namespace cmix {

namespace {

std::string dims(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

void require_square(const Matrix& s, const char* what) {
  if (s.rows() != s.cols() || s.rows() == 0) {
    throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " +
                         dims(s));
  }
}

void require_same_dim(const Matrix& a, const Matrix& b, const char* what) {
  require_square(a, what);
  require_square(b, what);
  if (a.rows() != b.rows()) {
    throw DimensionError(std::string(what) + ": dimension mismatch " + dims(a) + " vs " +
                         dims(b));
  }
}

double max_norm(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

Matrix identity_like(const Matrix& m) { return Matrix::Identity(m.rows(), m.cols()); }

Matrix resolvent(const Matrix& s, Complex z) {
  require_square(s, "resolvent");
  Matrix shifted = s - z * identity_like(s);
  return shifted.partialPivLu().inverse();
}

StructureReport check_structure(const Matrix& s, StructureKind kind, double tol) {
  require_square(s, "check_structure");
  if (!(tol > 0.0)) throw ArgumentError("check_structure: tol must be positive");
  StructureReport report;
  if (kind == StructureKind::unitary) {
    report.deviation = max_norm(s.adjoint() * s - identity_like(s));
  } else {
    report.deviation = max_norm(s - s.adjoint());
  }
  report.pass = report.deviation <= tol;
  return report;
}

SpectralDecomposition decompose(const Matrix& s, double normal_tol) {
  require_square(s, "decompose");
  const double scale = std::max(1.0, max_norm(s));
  SpectralDecomposition dec;

  if (max_norm(s - s.adjoint()) <= normal_tol * scale) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(s));
    if (solver.info() != Eigen::Success) {
      throw StructureError("decompose: self-adjoint eigensolver failed", 0.0);
    }
    dec.eigenvalues = solver.eigenvalues().cast<Complex>();
    dec.eigenvectors = solver.eigenvectors();
    dec.hermitian = true;
  } else {
    const double normality = max_norm(s * s.adjoint() - s.adjoint() * s);
    if (normality > normal_tol * scale * scale) {
      throw StructureError("decompose: matrix is not normal (||SS*-S*S|| = " +
                               std::to_string(normality) + ")",
                           normality);
    }
    Eigen::ComplexSchur<Matrix> schur(s);
    if (schur.info() != Eigen::Success) {
      throw StructureError("decompose: Schur decomposition failed", 0.0);
    }
    dec.eigenvalues = schur.matrixT().diagonal();
    dec.eigenvectors = schur.matrixU();
    dec.hermitian = false;
  }

  double residual = 0.0;
  for (Eigen::Index j = 0; j < dec.eigenvalues.size(); ++j) {
    const Vector v = dec.eigenvectors.col(j);
    residual = std::max(residual, (s * v - dec.eigenvalues(j) * v).norm());
  }
  dec.residual = residual;
  return dec;
}

Matrix functional_calculus(const SpectralDecomposition& dec, const ScalarFunction& g) {
  Vector values(dec.eigenvalues.size());
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    const Complex lambda = dec.eigenvalues(j);
    const Complex gv = g(lambda);
    if (!is_finite(gv)) {
      std::ostringstream os;
      os << "functional_calculus: g is not finite at eigenvalue " << lambda;
      throw EvaluationError(os.str());
    }
    values(j) = gv;
  }
  return dec.eigenvectors * values.asDiagonal() * dec.eigenvectors.adjoint();
}

Matrix functional_calculus(const Matrix& s, const ScalarFunction& g, double normal_tol) {
  return functional_calculus(decompose(s, normal_tol), g);
}

SpectralSet::SpectralSet(Predicate contains, Distance boundary_distance, std::string label)
    : contains_(std::move(contains)),
      distance_(std::move(boundary_distance)),
      label_(std::move(label)) {}

SpectralSet SpectralSet::everything() {
  return SpectralSet([](Complex) { return true; },
                     [](Complex) { return std::numeric_limits<double>::infinity(); },
                     "everything");
}

SpectralSet SpectralSet::real_line_without(double point) {
  return SpectralSet([point](Complex z) { return z.real() != point; },
                     [point](Complex z) { return std::abs(z.real() - point); },
                     "R\\{" + std::to_string(point) + "}");
}

SpectralSet SpectralSet::open_interval(double a, double b) {
  if (!(a < b)) throw ArgumentError("SpectralSet::open_interval: need a < b");
  return SpectralSet([a, b](Complex z) { return z.real() > a && z.real() < b; },
                     [a, b](Complex z) {
                       return std::min(std::abs(z.real() - a), std::abs(z.real() - b));
                     },
                     "(" + std::to_string(a) + "," + std::to_string(b) + ")");
}

SpectralSet SpectralSet::positive() {
  return open_interval(0.0, std::numeric_limits<double>::infinity());
}

SpectralSet SpectralSet::circle_arc(double center, double half_width) {
  if (!(half_width >= 0.0)) throw ArgumentError("SpectralSet::circle_arc: negative width");
  auto offset = [center](Complex z) {
    const double d = std::remainder(std::arg(z) - center, 2.0 * std::numbers::pi);
    return std::abs(d);
  };
  return SpectralSet([offset, half_width](Complex z) { return offset(z) <= half_width; },
                     [offset, half_width](Complex z) {
                       return std::abs(offset(z) - half_width);
                     },
                     "arc(" + std::to_string(center) + "," + std::to_string(half_width) + ")");
}

SpectralSet SpectralSet::complement() const {
  auto inner = contains_;
  return SpectralSet([inner](Complex z) { return !inner(z); }, distance_, "not " + label_);
}

SpectralProjection spectral_projector(const SpectralDecomposition& dec, const SpectralSet& set,
                                      double tol) {
  SpectralProjection out;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index j = 0; j < dec.eigenvalues.size(); ++j) {
    const Complex lambda = dec.eigenvalues(j);
    if (set.boundary_distance(lambda) <= tol) {
      out.warnings.push_back({"eigenvalue within tolerance of the boundary of " + set.label(),
                              lambda});
    }
    if (set.contains(lambda)) kept.push_back(j);
  }
  const Eigen::Index dim = dec.eigenvectors.rows();
  Matrix basis(dim, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    basis.col(static_cast<Eigen::Index>(c)) = dec.eigenvectors.col(kept[c]);
  }
  out.projector = basis * basis.adjoint();
  out.rank = kept.size();
  return out;
}

SpectralProjection spectral_projector(const Matrix& s, const SpectralSet& set, double tol) {
  return spectral_projector(decompose(s), set, tol);
}

KernelSplit kernel_split(const Matrix& d, double tol, double margin) {
  require_square(d, "kernel_split");
  if (!(tol > 0.0)) throw ArgumentError("kernel_split: tol must be positive");
  if (!(margin >= 1.0)) throw ArgumentError("kernel_split: margin must be >= 1");
  const double herm_dev = max_norm(d - d.adjoint());
  if (herm_dev > 1e-9 * std::max(1.0, max_norm(d))) {
    throw StructureError("kernel_split: D is not Hermitian", herm_dev);
  }

  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(d));
  const RealVector& lambda = solver.eigenvalues();
  const double norm = lambda.size() ? lambda.cwiseAbs().maxCoeff() : 0.0;

  KernelSplit split;
  split.tol = tol;
  split.threshold = tol * norm;
  split.eigenvalues = lambda;

  std::vector<Eigen::Index> ker, perp;
  for (Eigen::Index j = 0; j < lambda.size(); ++j) {
    const double a = std::abs(lambda(j));
    if (a <= split.threshold) {
      ker.push_back(j);
    } else {
      perp.push_back(j);
    }
    if (split.threshold > 0.0 && a != 0.0 && a >= split.threshold / margin &&
        a <= split.threshold * margin) {
      split.warnings.push_back({"eigenvalue inside the ambiguity band around tol*||D||",
                                Complex(lambda(j), 0.0)});
    }
  }

  const Matrix& v = solver.eigenvectors();
  auto gather = [&v](const std::vector<Eigen::Index>& idx) {
    Matrix basis(v.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) {
      basis.col(static_cast<Eigen::Index>(c)) = v.col(idx[c]);
    }
    return basis;
  };
  split.kernel_basis = gather(ker);
  split.perp_basis = gather(perp);
  split.kernel_projector = split.kernel_basis * split.kernel_basis.adjoint();
  split.perp_projector = split.perp_basis * split.perp_basis.adjoint();
  split.kernel_dim = ker.size();
  return split;
}

Matrix cayley_transform(const Matrix& u, double singular_tol) {
  require_square(u, "cayley_transform");
  const StructureReport unitary = check_structure(u, StructureKind::unitary, 1e-8);
  if (!unitary.pass) {
    throw StructureError("cayley_transform: U is not unitary", unitary.deviation);
  }
  const SpectralDecomposition dec = decompose(u);
  Eigen::Index nearest = 0;
  double distance = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < dec.eigenvalues.size(); ++j) {
    const double dj = std::abs(dec.eigenvalues(j) - 1.0);
    if (dj < distance) {
      distance = dj;
      nearest = j;
    }
  }
  if (distance <= singular_tol) {
    const Complex z = dec.eigenvalues(nearest);
    std::ostringstream os;
    os << "cayley_transform: eigenvalue " << z << " of U is within " << singular_tol
       << " of 1";
    throw SingularityError(os.str(), z.real(), z.imag());
  }
  const Matrix id = identity_like(u);
  // (1 + U) and (1 - U)^{-1} commute.
  const Matrix h = kI * (id - u).partialPivLu().solve(id + u);
  return hermitian_part(h);
}

Matrix inverse_cayley_transform(const Matrix& h) {
  require_square(h, "inverse_cayley_transform");
  const StructureReport herm = check_structure(h, StructureKind::hermitian,
                                               1e-9 * std::max(1.0, max_norm(h)));
  if (!herm.pass) {
    throw StructureError("inverse_cayley_transform: H is not Hermitian", herm.deviation);
  }
  const Matrix id = identity_like(h);
  return (h + kI * id).partialPivLu().solve(h - kI * id);
}

}  // namespace cmix
