#pragma once

// Dense complex linear algebra used by every other module: adjoints, general
// (non-Hermitian) eigendecomposition with a residual certificate, Hermitian
// definiteness, and the matrix exponential.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "pseudospec/errors.hpp"

namespace pseudospec {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kDefaultTol = 1e-10;
inline constexpr double kHermitianTol = 1e-12;
inline constexpr Eigen::Index kMaxDimension = 1024;

/// max(1, ‖A‖_F): the scale every relative tolerance in the library is taken against.
inline double scale_of(const CMatrix& a) { return std::max(1.0, a.norm()); }

inline void require_square(const CMatrix& a, const char* where) {
  if (a.rows() != a.cols()) {
    throw DimensionMismatch(std::string(where) + ": matrix is " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + ", expected square");
  }
}

inline void require_finite(const CMatrix& a, const char* where) {
  if (!a.allFinite()) throw InvalidArgument(std::string(where) + ": matrix has non-finite entries");
}

inline CMatrix adjoint(const CMatrix& a) {
  require_square(a, "adjoint");
  return a.adjoint();
}

inline double frob_distance(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("frob_distance: operands have different shapes");
  }
  return (a - b).norm();
}

/// Lexicographic (real, imaginary) order used for every reported spectrum.
inline bool spectral_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

inline std::vector<Complex> sorted_spectrum(std::vector<Complex> values) {
  std::sort(values.begin(), values.end(), spectral_less);
  return values;
}

inline std::vector<Complex> to_std(const CVector& v) { return {v.data(), v.data() + v.size()}; }

struct EigenSystem {
  CVector values;
  CMatrix vectors;  // columns are unit-norm right eigenvectors
  double residual = 0.0;

  std::vector<Complex> spectrum() const { return to_std(values); }
};

/// Certified residual max_i ‖A v_i − λ_i v_i‖ / (‖v_i‖ max(1, ‖A‖_F)).
inline double eigen_residual(const CMatrix& a, const CVector& values, const CMatrix& vectors) {
  const double scale = scale_of(a);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const CVector v = vectors.col(i);
    const double vn = v.norm();
    if (vn == 0.0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, (a * v - values(i) * v).norm() / (vn * scale));
  }
  return worst;
}

inline EigenSystem eigendecompose(const CMatrix& a, double tol = kDefaultTol) {
  require_square(a, "eigendecompose");
  require_finite(a, "eigendecompose");
  if (a.rows() > kMaxDimension) {
    throw InvalidArgument("eigendecompose: dimension " + std::to_string(a.rows()) + " exceeds " +
                          std::to_string(kMaxDimension));
  }
  const Eigen::Index n = a.rows();
  if (n == 0) return {};

  Eigen::ComplexEigenSolver<CMatrix> solver(a, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceFailure("eigendecompose: QR iteration did not converge");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const CVector& raw = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return spectral_less(raw(i), raw(j)); });

  EigenSystem out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = raw(order[k]);
    out.vectors.col(k) = solver.eigenvectors().col(order[k]).normalized();
  }
  out.residual = eigen_residual(a, out.values, out.vectors);
  if (!(out.residual <= tol)) {
    throw ConvergenceFailure("eigendecompose: residual " + std::to_string(out.residual) +
                             " exceeds tolerance " + std::to_string(tol));
  }
  return out;
}

inline double hermiticity_residual(const CMatrix& a) { return (a - a.adjoint()).norm() / scale_of(a); }

inline double min_eig_hermitian(const CMatrix& a) {
  require_square(a, "min_eig_hermitian");
  if (hermiticity_residual(a) > kHermitianTol) {
    throw NotHermitian("min_eig_hermitian: ‖A − A†‖_F exceeds 1e-12 max(1, ‖A‖_F)");
  }
  if (a.rows() == 0) return std::numeric_limits<double>::infinity();
  const CMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConvergenceFailure("min_eig_hermitian: solver failed");
  return solver.eigenvalues().minCoeff();
}

/// exp(A) by Padé scaling and squaring.
inline CMatrix mat_exp(const CMatrix& a) {
  require_square(a, "mat_exp");
  require_finite(a, "mat_exp");
  return a.exp();
}

/// 2-norm condition number of the eigenvector matrix after column normalization.
inline double eigenvector_condition(const CMatrix& vectors) {
  if (vectors.size() == 0) return 1.0;
  CMatrix cols = vectors;
  for (Eigen::Index j = 0; j < cols.cols(); ++j) cols.col(j).normalize();
  Eigen::JacobiSVD<CMatrix> svd(cols);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

}  // namespace pseudospec
