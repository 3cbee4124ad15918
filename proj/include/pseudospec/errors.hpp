#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pseudospec {

enum class ErrorKind {
  invalid_argument,
  dimension_mismatch,
  convergence_failure,
  not_hermitian,
  not_positive_definite,
  exceptional_point,
  singular_denominator,
  complex_spectrum,
  asymmetric_grid,
  scheme_boundary_mismatch,
  odd_potential,
  no_analytic_derivative,
  io_error,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "InvalidArgument";
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::convergence_failure: return "ConvergenceFailure";
    case ErrorKind::not_hermitian: return "NotHermitian";
    case ErrorKind::not_positive_definite: return "NotPositiveDefinite";
    case ErrorKind::exceptional_point: return "ExceptionalPoint";
    case ErrorKind::singular_denominator: return "SingularDenominator";
    case ErrorKind::complex_spectrum: return "ComplexSpectrum";
    case ErrorKind::asymmetric_grid: return "AsymmetricGrid";
    case ErrorKind::scheme_boundary_mismatch: return "SchemeBoundaryMismatch";
    case ErrorKind::odd_potential: return "OddPotential";
    case ErrorKind::no_analytic_derivative: return "NoAnalyticDerivative";
    case ErrorKind::io_error: return "IoError";
  }
  return "Unknown";
}

/// Base class of every exception raised by the library. The kind drives the
/// CLI exit code and the `error` field of the machine-readable error record.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return to_string(kind_); }

 private:
  ErrorKind kind_;
};

template <ErrorKind K>
class ErrorOf : public Error {
 public:
  explicit ErrorOf(const std::string& what) : Error(K, what) {}
};

using InvalidArgument = ErrorOf<ErrorKind::invalid_argument>;
using DimensionMismatch = ErrorOf<ErrorKind::dimension_mismatch>;
using ConvergenceFailure = ErrorOf<ErrorKind::convergence_failure>;
using NotHermitian = ErrorOf<ErrorKind::not_hermitian>;
using NotPositiveDefinite = ErrorOf<ErrorKind::not_positive_definite>;
using ExceptionalPoint = ErrorOf<ErrorKind::exceptional_point>;
using SingularDenominator = ErrorOf<ErrorKind::singular_denominator>;
using ComplexSpectrum = ErrorOf<ErrorKind::complex_spectrum>;
using AsymmetricGrid = ErrorOf<ErrorKind::asymmetric_grid>;
using SchemeBoundaryMismatch = ErrorOf<ErrorKind::scheme_boundary_mismatch>;
using OddPotential = ErrorOf<ErrorKind::odd_potential>;
using NoAnalyticDerivative = ErrorOf<ErrorKind::no_analytic_derivative>;
using IoError = ErrorOf<ErrorKind::io_error>;

}  // namespace pseudospec
