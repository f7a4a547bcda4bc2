#include "cmix/grid_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/FFT>

#include "cmix/errors.hpp"

namespace cmix {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Point lattice_point(const Shape& shape, std::size_t flat) {
  Point x(shape.size());
  for (std::size_t a = shape.size(); a-- > 0;) {
    const std::size_t n = shape[a];
    x[a] = static_cast<double>(flat % n) / static_cast<double>(n);
    flat /= n;
  }
  return x;
}

// In-place transform along every axis. Unscaled in both directions.
void transform(const Shape& shape, std::vector<Complex>& data, bool inverse) {
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  std::size_t stride = 1;
  std::vector<Complex> line, out;
  for (std::size_t a = shape.size(); a-- > 0;) {
    const std::size_t n = shape[a];
    const std::size_t block = n * stride;
    line.resize(n);
    for (std::size_t base = 0; base < data.size(); base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        for (std::size_t j = 0; j < n; ++j) line[j] = data[base + off + j * stride];
        if (inverse) {
          fft.inv(out, line);
        } else {
          fft.fwd(out, line);
        }
        for (std::size_t j = 0; j < n; ++j) data[base + off + j * stride] = out[j];
      }
    }
    stride = block;
  }
}

// Signed frequency vector of a flat coefficient index.
std::vector<long> frequency_of(const Shape& shape, std::size_t flat) {
  std::vector<long> k(shape.size());
  for (std::size_t a = shape.size(); a-- > 0;) {
    const std::size_t n = shape[a];
    k[a] = signed_frequency(flat % n, n);
    flat /= n;
  }
  return k;
}

}  // namespace

void validate_shape(const Shape& shape) {
  if (shape.empty()) throw ArgumentError("grid shape must have at least one axis");
  for (std::size_t n : shape) {
    if (n < 2 || (n & (n - 1)) != 0) {
      throw ArgumentError("grid resolution must be a power of two >= 2, got " +
                          std::to_string(n));
    }
  }
}

std::size_t flat_size(const Shape& shape) {
  std::size_t s = 1;
  for (std::size_t n : shape) s *= n;
  return s;
}

long signed_frequency(std::size_t index, std::size_t n) {
  const long i = static_cast<long>(index);
  const long m = static_cast<long>(n);
  return 2 * i >= m ? i - m : i;
}

GridField::GridField(Shape shape) : shape_(std::move(shape)) {
  validate_shape(shape_);
  values_.assign(flat_size(shape_), Complex(0.0));
}

GridField::GridField(Shape shape, std::vector<Complex> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  validate_shape(shape_);
  if (values_.size() != flat_size(shape_)) {
    throw DimensionError("GridField: value count does not match shape");
  }
}

GridField GridField::sample(const Shape& shape, const std::function<Complex(const Point&)>& f) {
  GridField g(shape);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = f(g.point(i));
  return g;
}

Point GridField::point(std::size_t flat) const { return lattice_point(shape_, flat); }

Point MatrixField::point(std::size_t flat) const { return lattice_point(shape, flat); }

double GridField::sup_norm() const {
  double s = 0.0;
  for (const Complex& v : values_) s = std::max(s, std::abs(v));
  return s;
}

Complex GridField::mean() const {
  Complex s = 0.0;
  for (const Complex& v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

std::vector<Complex> forward_coefficients(const GridField& f) {
  std::vector<Complex> c = f.values();
  transform(f.shape(), c, false);
  const double inv = 1.0 / static_cast<double>(c.size());
  for (Complex& v : c) v *= inv;
  return c;
}

GridField from_coefficients(const Shape& shape, std::vector<Complex> coefficients) {
  validate_shape(shape);
  if (coefficients.size() != flat_size(shape)) {
    throw DimensionError("from_coefficients: coefficient count does not match shape");
  }
  transform(shape, coefficients, true);
  return GridField(shape, std::move(coefficients));
}

double outer_band_energy(const GridField& f) {
  const std::vector<Complex> c = forward_coefficients(f);
  double total = 0.0, outer = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double e = std::norm(c[i]);
    total += e;
    const std::vector<long> k = frequency_of(f.shape(), i);
    bool out = false;
    for (std::size_t a = 0; a < k.size(); ++a) {
      if (8 * std::abs(k[a]) >= 3 * static_cast<long>(f.shape()[a])) out = true;
    }
    if (out) outer += e;
  }
  return total > 0.0 ? outer / total : 0.0;
}

void require_band_limited(const GridField& f, const char* what, double tol) {
  const double e = outer_band_energy(f);
  if (e > tol) {
    throw ResolutionError(std::string(what) + ": field is not band-limited on its grid " +
                          "(outer-band energy " + std::to_string(e) + "); refine the grid");
  }
}

GridField shifted(const GridField& f, const Point& s) {
  if (s.size() != f.dims()) throw DimensionError("shifted: shift dimension");
  std::vector<Complex> c = forward_coefficients(f);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const std::vector<long> k = frequency_of(f.shape(), i);
    double phase = 0.0;
    for (std::size_t a = 0; a < k.size(); ++a) {
      // Reduce k s mod 1 before scaling; s may be large (N y).
      phase += std::remainder(static_cast<double>(k[a]) * s[a], 1.0);
    }
    c[i] *= std::polar(1.0, kTwoPi * phase);
  }
  return from_coefficients(f.shape(), std::move(c));
}

GridField directional_derivative(const GridField& f, const Point& y) {
  if (y.size() != f.dims()) throw DimensionError("directional_derivative: direction dimension");
  std::vector<Complex> c = forward_coefficients(f);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const std::vector<long> k = frequency_of(f.shape(), i);
    double ky = 0.0;
    for (std::size_t a = 0; a < k.size(); ++a) ky += static_cast<double>(k[a]) * y[a];
    c[i] *= Complex(0.0, kTwoPi * ky);
  }
  return from_coefficients(f.shape(), std::move(c));
}

Complex inner(const GridField& f, const GridField& g) {
  if (f.shape() != g.shape()) throw DimensionError("inner: shapes differ");
  Complex s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::conj(f[i]) * g[i];
  return s / static_cast<double>(f.size());
}

TrigPolynomial::TrigPolynomial(std::size_t dims, const std::vector<FourierTerm>& terms)
    : dims_(dims) {
  for (const FourierTerm& t : terms) {
    if (t.frequency.size() != dims) {
      throw DimensionError("TrigPolynomial: frequency of length " +
                           std::to_string(t.frequency.size()) + ", expected " +
                           std::to_string(dims));
    }
    terms_[t.frequency] += t.coeff;
  }
}

Complex TrigPolynomial::operator()(const Point& x) const {
  if (x.size() != dims_) throw DimensionError("TrigPolynomial: point dimension");
  Complex s = 0.0;
  for (const auto& [k, c] : terms_) {
    double phase = 0.0;
    for (std::size_t a = 0; a < dims_; ++a) phase += k[a] * x[a];
    s += c * std::polar(1.0, kTwoPi * phase);
  }
  return s;
}

TrigPolynomial TrigPolynomial::derivative(const Point& y) const {
  if (y.size() != dims_) throw DimensionError("TrigPolynomial: direction dimension");
  std::vector<FourierTerm> out;
  for (const auto& [k, c] : terms_) {
    double ky = 0.0;
    for (std::size_t a = 0; a < dims_; ++a) ky += k[a] * y[a];
    out.push_back({k, c * Complex(0.0, kTwoPi * ky)});
  }
  return TrigPolynomial(dims_, out);
}

GridField TrigPolynomial::sampled(const Shape& shape) const {
  if (shape.size() != dims_) throw DimensionError("TrigPolynomial: grid dimension");
  return GridField::sample(shape, [this](const Point& x) { return (*this)(x); });
}

int TrigPolynomial::bandwidth() const {
  int b = 0;
  for (const auto& [k, c] : terms_) {
    for (int ka : k) b = std::max(b, std::abs(ka));
  }
  return b;
}

double TrigPolynomial::l2_norm_sq() const {
  double s = 0.0;
  for (const auto& [k, c] : terms_) s += std::norm(c);
  return s;
}

double TrigPolynomial::coefficient_l1() const {
  double s = 0.0;
  for (const auto& [k, c] : terms_) s += std::abs(c);
  return s;
}

double TrigPolynomial::hermitian_defect() const {
  double d = 0.0;
  for (const auto& [k, c] : terms_) {
    Frequency minus(k.size());
    for (std::size_t a = 0; a < k.size(); ++a) minus[a] = -k[a];
    const auto it = terms_.find(minus);
    const Complex partner = it == terms_.end() ? Complex(0.0) : it->second;
    d = std::max(d, std::abs(c - std::conj(partner)));
  }
  return d;
}

}  // namespace cmix
