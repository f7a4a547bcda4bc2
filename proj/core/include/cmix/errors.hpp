#pragma once

#include <stdexcept>
#include <string>

namespace cmix {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes are incompatible (non-square, mismatched dims).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An operator failed a unitary/Hermitian/normal structure check.
class StructureError : public Error {
 public:
  StructureError(const std::string& what, double deviation)
      : Error(what), deviation_(deviation) {}
  double deviation() const noexcept { return deviation_; }

 private:
  double deviation_;
};

/// A scalar function produced a non-finite value on the spectrum.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// The Cayley transform was requested for a unitary with spectrum near 1.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, double nearest_re, double nearest_im)
      : Error(what), nearest_re_(nearest_re), nearest_im_(nearest_im) {}
  double nearest_re() const noexcept { return nearest_re_; }
  double nearest_im() const noexcept { return nearest_im_; }

 private:
  double nearest_re_;
  double nearest_im_;
};

/// Invalid argument value (N = 0, empty schedule, bad window, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature ran out of node budget before meeting tolerance.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// A sampled field or circle function is not resolved by its grid.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Malformed config, graph file or report.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace cmix
