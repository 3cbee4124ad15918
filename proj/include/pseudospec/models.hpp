#pragma once

// Momentum-space 2x2 blocks of the two Dirac models: the planar Dirac particle
// with imaginary Rashba coupling (model I) and the 1+1-D particle in the
// constant antisymmetric scalar potential V0 [[0, 1], [-1, 0]] (model II).
// Representation: alpha = (sigma_x, sigma_y), beta = diag(1, -1).

#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include "pseudospec/numkit.hpp"

namespace pseudospec {

struct PhysParams {
  double m0 = 1.0;
  double c = 1.0;
  double hbar = 1.0;

  void validate() const {
    if (!std::isfinite(m0) || !std::isfinite(c) || !std::isfinite(hbar) || m0 < 0.0 || c <= 0.0 ||
        hbar <= 0.0) {
      throw InvalidArgument("PhysParams: require m0 >= 0, c > 0, hbar > 0 (all finite)");
    }
  }
  double rest_energy() const { return m0 * c * c; }
};

struct RashbaCoupling {
  double lambda = 0.0;
};

struct ScalarCoupling {
  double v0 = 0.0;
};

struct Momentum2 {
  double kx = 0.0;
  double ky = 0.0;

  Complex p_plus(double hbar) const { return hbar * Complex(kx, ky); }
  Complex p_minus(double hbar) const { return hbar * Complex(kx, -ky); }
  double k_squared() const { return kx * kx + ky * ky; }
};

/// The two roots ±E; `plus` is the principal square root of the radicand.
struct EnergyPair {
  Complex plus;
  Complex minus;
};

/// Eigenvectors of H† for +E (u1) and -E (u2), scaled with a unit upper (u1)
/// or lower (u2) component. `residual` is the larger of the two relative
/// eigen-residuals against H†.
struct AdjointSpinors {
  CVector u1;
  CVector u2;
  Complex energy;
  double residual = 0.0;
};

struct ParityConvention {
  double delta = 0.0;
};

inline constexpr double kSpinorResidualTol = 1e-10;

namespace detail {

inline void require_finite_value(double v, const char* what) {
  if (!std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be finite");
}

inline void validate(const PhysParams& pp, const Momentum2& k) {
  pp.validate();
  require_finite_value(k.kx, "kx");
  require_finite_value(k.ky, "ky");
}

inline EnergyPair roots_of(Complex radicand) {
  const Complex e = std::sqrt(radicand);
  return {e, -e};
}

inline CMatrix block(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline double pair_residual(const CMatrix& hdag, const CVector& u1, const CVector& u2, Complex e) {
  return std::max(eigen_residual(hdag, CVector::Constant(1, e), u1),
                  eigen_residual(hdag, CVector::Constant(1, -e), u2));
}

// |E| small against the natural energy scale means +E and -E coalesce.
inline void require_separated_roots(Complex e, double scale, const char* where) {
  if (std::abs(e) <= 1e-8 * scale) {
    throw ExceptionalPoint(std::string(where) + ": roots ±E coalesce (|E| = " +
                           std::to_string(std::abs(e)) + ")");
  }
}

}  // namespace detail

// ---------------------------------------------------------------- model I

inline CMatrix build_rashba(const Momentum2& k, const PhysParams& pp, const RashbaCoupling& rc) {
  detail::validate(pp, k);
  detail::require_finite_value(rc.lambda, "lambda");
  const double mc2 = pp.rest_energy();
  return detail::block(mc2, (pp.c - rc.lambda) * k.p_minus(pp.hbar),
                       (pp.c + rc.lambda) * k.p_plus(pp.hbar), -mc2);
}

inline Complex rashba_radicand(const Momentum2& k, const PhysParams& pp, const RashbaCoupling& rc) {
  const double mc2 = pp.rest_energy();
  return {mc2 * mc2 + (pp.c * pp.c - rc.lambda * rc.lambda) * pp.hbar * pp.hbar * k.k_squared(), 0.0};
}

inline EnergyPair rashba_energy(const Momentum2& k, const PhysParams& pp, const RashbaCoupling& rc) {
  detail::validate(pp, k);
  return detail::roots_of(rashba_radicand(k, pp, rc));
}

inline AdjointSpinors rashba_adjoint_spinors(const Momentum2& k, const PhysParams& pp,
                                             const RashbaCoupling& rc) {
  const CMatrix hdag = adjoint(build_rashba(k, pp, rc));
  const Complex e = rashba_energy(k, pp, rc).plus;
  const double mc2 = pp.rest_energy();
  const double scale = std::max({mc2, pp.c * pp.hbar * std::sqrt(k.k_squared()),
                                 std::numeric_limits<double>::min()});
  detail::require_separated_roots(e, scale, "rashba_adjoint_spinors");
  const Complex denom = e + mc2;

  AdjointSpinors s;
  s.energy = e;
  s.u1 = CVector(2);
  s.u1 << 1.0, (pp.c - rc.lambda) * k.p_plus(pp.hbar) / denom;
  s.u2 = CVector(2);
  s.u2 << -(pp.c + rc.lambda) * k.p_minus(pp.hbar) / denom, 1.0;
  s.residual = detail::pair_residual(hdag, s.u1, s.u2, e);
  if (!(s.residual <= kSpinorResidualTol)) {
    throw ExceptionalPoint("rashba_adjoint_spinors: spinor residual " + std::to_string(s.residual));
  }
  return s;
}

/// The closed-form metric printed for model I, assembled entry by entry. It is
/// a diagnostic: use check_metric to see whether it satisfies ηH = H†η.
inline CMatrix eta_paper_rashba(const Momentum2& k, const PhysParams& pp, const RashbaCoupling& rc) {
  const Complex e = rashba_energy(k, pp, rc).plus;
  const double mc2 = pp.rest_energy();
  const double c = pp.c;
  const double lam = rc.lambda;
  const Complex pp_ = k.p_plus(pp.hbar);
  const Complex pm = k.p_minus(pp.hbar);
  const Complex gap = e * e - mc2 * mc2;
  if (std::abs(gap) <= 1e-14 * std::max(1.0, mc2 * mc2)) {
    throw SingularDenominator("eta_paper_rashba: E^2 = (m0 c^2)^2, printed metric is 0/0");
  }
  const Complex cross = c * e + lam * mc2;
  return detail::block(1.0 + (c + lam) * (c + lam) * pp_ * pm / ((e - mc2) * (e - mc2)),
                       2.0 * pm * cross / gap, 2.0 * pp_ * cross / gap,
                       1.0 + (c - lam) * (c - lam) * pp_ * pm / ((e + mc2) * (e + mc2)));
}

/// k-independent metric diag(c + λ, c − λ); exact for every k when |λ| < c.
inline CMatrix eta_diag_rashba(const PhysParams& pp, const RashbaCoupling& rc) {
  pp.validate();
  detail::require_finite_value(rc.lambda, "lambda");
  if (std::abs(rc.lambda) >= pp.c) {
    throw NotPositiveDefinite("eta_diag_rashba: diag(c+λ, c−λ) requires |λ| < c");
  }
  return detail::block(pp.c + rc.lambda, 0.0, 0.0, pp.c - rc.lambda);
}

// --------------------------------------------------------------- model II

inline CMatrix build_scalar_const(double kx, const PhysParams& pp, const ScalarCoupling& sc) {
  detail::validate(pp, {kx, 0.0});
  detail::require_finite_value(sc.v0, "v0");
  const double mc2 = pp.rest_energy();
  const double cp = pp.c * pp.hbar * kx;
  return detail::block(mc2, cp + sc.v0, cp - sc.v0, -mc2);
}

inline Complex scalar_radicand(double kx, const PhysParams& pp, const ScalarCoupling& sc) {
  const double mc2 = pp.rest_energy();
  const double cp = pp.c * pp.hbar * kx;
  return {cp * cp + mc2 * mc2 - sc.v0 * sc.v0, 0.0};
}

inline EnergyPair scalar_energy(double kx, const PhysParams& pp, const ScalarCoupling& sc) {
  detail::validate(pp, {kx, 0.0});
  return detail::roots_of(scalar_radicand(kx, pp, sc));
}

inline AdjointSpinors scalar_adjoint_spinors(double kx, const PhysParams& pp, const ScalarCoupling& sc) {
  const CMatrix hdag = adjoint(build_scalar_const(kx, pp, sc));
  const Complex e = scalar_energy(kx, pp, sc).plus;
  const double mc2 = pp.rest_energy();
  const double cp = pp.c * pp.hbar * kx;
  const double scale =
      std::max({mc2, std::abs(cp), std::abs(sc.v0), std::numeric_limits<double>::min()});
  detail::require_separated_roots(e, scale, "scalar_adjoint_spinors");
  const Complex denom = e + mc2;

  AdjointSpinors s;
  s.energy = e;
  s.u1 = CVector(2);
  s.u1 << 1.0, (cp + sc.v0) / denom;
  s.u2 = CVector(2);
  s.u2 << -(cp - sc.v0) / denom, 1.0;
  s.residual = detail::pair_residual(hdag, s.u1, s.u2, e);
  if (!(s.residual <= kSpinorResidualTol)) {
    throw ExceptionalPoint("scalar_adjoint_spinors: spinor residual " + std::to_string(s.residual));
  }
  return s;
}

/// The closed-form metric printed for model II (the stray trailing minus sign
/// of its (1,1) entry dropped). Diagnostic only, like eta_paper_rashba.
inline CMatrix eta_paper_scalar(double kx, const PhysParams& pp, const ScalarCoupling& sc) {
  const Complex e = scalar_energy(kx, pp, sc).plus;
  const double mc2 = pp.rest_energy();
  const double cp = pp.c * pp.hbar * kx;
  const double v0 = sc.v0;
  const Complex gap = e * e - mc2 * mc2;
  if (std::abs(gap) <= 1e-14 * std::max(1.0, mc2 * mc2)) {
    throw SingularDenominator("eta_paper_scalar: E^2 = (m0 c^2)^2, printed metric is 0/0");
  }
  const Complex upper = (cp + v0) / (e - mc2);
  const Complex lower = (cp - v0) / (e + mc2);
  const Complex off = (2.0 * e * cp - 2.0 * v0 * mc2) / gap;
  return detail::block(1.0 + upper * upper, off, off, 1.0 + lower * lower);
}

// ----------------------------------------------------------------- parity

/// e^{iδ} diag(I_half, −I_half), i.e. β e^{iδ} in block form.
inline CMatrix parity_matrix(const ParityConvention& pc, Eigen::Index half_dim) {
  if (half_dim <= 0) throw InvalidArgument("parity_matrix: half_dim must be positive");
  const Complex phase = std::polar(1.0, pc.delta);
  CMatrix p = CMatrix::Zero(2 * half_dim, 2 * half_dim);
  for (Eigen::Index i = 0; i < half_dim; ++i) {
    p(i, i) = phase;
    p(half_dim + i, half_dim + i) = -phase;
  }
  return p;
}

/// ‖P A P⁻¹ − B‖_F / max(1, ‖A‖_F).
inline double conjugation_residual(const CMatrix& p, const CMatrix& a, const CMatrix& b) {
  const CMatrix pinv = p.inverse();
  return frob_distance(p * a * pinv, b) / scale_of(a);
}

}  // namespace pseudospec
