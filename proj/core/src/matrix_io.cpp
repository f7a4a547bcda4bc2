#include "cmix/matrix_io.hpp"

#include <cmath>

#include "cmix/errors.hpp"

namespace cmix {

namespace {

nlohmann::json pair(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

Complex unpair(const nlohmann::json& p) {
  if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
    throw ParseError("matrix entry must be a [re, im] pair of numbers");
  }
  return {p[0].get<double>(), p[1].get<double>()};
}

}  // namespace

nlohmann::json matrix_to_json(const Matrix& m) {
  require_square(m, "matrix_to_json");
  nlohmann::json entries = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const Complex z = m(r, c);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw ArgumentError("matrix_to_json: non-finite entry");
      }
      entries.push_back(pair(z));
    }
  }
  return {{"format", "cmix.matrix"},
          {"version", kMatrixFormatVersion},
          {"dim", m.rows()},
          {"entries", std::move(entries)}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", "") != "cmix.matrix") {
    throw ParseError("matrix_from_json: missing format tag \"cmix.matrix\"");
  }
  if (j.value("version", -1) != kMatrixFormatVersion) {
    throw ParseError("matrix_from_json: unsupported version");
  }
  const auto dim = j.at("dim").get<long long>();
  if (dim <= 0) throw ParseError("matrix_from_json: dim must be positive");
  const auto& entries = j.at("entries");
  if (!entries.is_array() || entries.size() != static_cast<std::size_t>(dim * dim)) {
    throw ParseError("matrix_from_json: expected dim*dim entries");
  }
  Matrix m(dim, dim);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = unpair(entries[k++]);
  }
  return m;
}

nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(pair(v(k)));
  return out;
}

Vector vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("vector must be an array of [re, im] pairs");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = unpair(j[k]);
  return v;
}

std::string dump_matrix(const Matrix& m) { return matrix_to_json(m).dump(); }

Matrix parse_matrix(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("parse_matrix: ") + e.what());
  }
  return matrix_from_json(j);
}

}  // namespace cmix
