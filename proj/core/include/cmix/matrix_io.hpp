#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "cmix/operator_core.hpp"

namespace cmix {

inline constexpr int kMatrixFormatVersion = 1;

/// {"format": "cmix.matrix", "version": 1, "dim": n, "entries": [[re, im], ...]}
/// with entries row-major. Doubles are written in shortest round-trip form,
/// so finite matrices survive a write/read cycle bit for bit.
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json vector_to_json(const Vector& v);
Vector vector_from_json(const nlohmann::json& j);

std::string dump_matrix(const Matrix& m);
Matrix parse_matrix(const std::string& text);

}  // namespace cmix
