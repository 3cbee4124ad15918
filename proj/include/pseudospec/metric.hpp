#pragma once

// Metric operators for pseudo-Hermitian Hamiltonians: the spectral
// construction η = Σ w_n |φ_n⟩⟨φ_n| over eigenvectors of H†, certification of
// ηH = H†η, the η inner product, spectrum classification and the propagator.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pseudospec/models.hpp"
#include "pseudospec/numkit.hpp"

namespace pseudospec {

enum class Provenance { spectral, paper_printed, diagonal_derived, user_supplied };

constexpr std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::spectral: return "spectral";
    case Provenance::paper_printed: return "paper_printed";
    case Provenance::diagonal_derived: return "diagonal_derived";
    case Provenance::user_supplied: return "user_supplied";
  }
  return "unknown";
}

/// Hermitian candidate metric with a cached smallest eigenvalue. Immutable.
class MetricOperator {
 public:
  static MetricOperator make(CMatrix eta, Provenance provenance) {
    require_square(eta, "MetricOperator");
    require_finite(eta, "MetricOperator");
    const double min_eig = min_eig_hermitian(eta);  // throws NotHermitian
    return MetricOperator(std::move(eta), provenance, min_eig);
  }

  const CMatrix& eta() const noexcept { return eta_; }
  Provenance provenance() const noexcept { return provenance_; }
  double min_eig() const noexcept { return min_eig_; }
  bool positive_definite(double tol = kDefaultTol) const { return min_eig_ > tol * scale_of(eta_); }

 private:
  MetricOperator(CMatrix eta, Provenance provenance, double min_eig)
      : eta_(std::move(eta)), provenance_(provenance), min_eig_(min_eig) {}

  CMatrix eta_;
  Provenance provenance_;
  double min_eig_;
};

enum class Verdict { valid_metric, indefinite, relation_violated };

constexpr std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::valid_metric: return "valid_metric";
    case Verdict::indefinite: return "indefinite";
    case Verdict::relation_violated: return "relation_violated";
  }
  return "unknown";
}

struct MetricReport {
  double relation_residual = 0.0;     // ‖ηH − H†η‖_F / max(1, ‖H‖_F)
  double hermiticity_residual = 0.0;  // ‖η − η†‖_F / max(1, ‖η‖_F)
  double min_eig = 0.0;               // of the Hermitian part of η
  Verdict verdict = Verdict::relation_violated;
};

enum class SpectrumKind { all_real, conjugate_pairs, mixed };

constexpr std::string_view to_string(SpectrumKind k) noexcept {
  switch (k) {
    case SpectrumKind::all_real: return "all_real";
    case SpectrumKind::conjugate_pairs: return "conjugate_pairs";
    case SpectrumKind::mixed: return "mixed";
  }
  return "unknown";
}

struct SpectrumClassification {
  SpectrumKind kind = SpectrumKind::all_real;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (i, i) for real values
  double tol = kDefaultTol;
};

inline constexpr double kExceptionalConditionLimit = 1e8;

inline bool is_real(const Complex& z, double tol) {
  return std::abs(z.imag()) <= tol * std::max(1.0, std::abs(z));
}

// ------------------------------------------------------------ classification

/// all_real if every value is real to tol (relative to max(1, |λ|)); otherwise
/// real values self-pair and the rest are matched greedily to their nearest
/// conjugate partner after sorting by (Re, |Im|).
inline SpectrumClassification classify_spectrum(const std::vector<Complex>& values,
                                                double tol = kDefaultTol) {
  SpectrumClassification out;
  out.tol = tol;
  const std::size_t n = values.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a].real() != values[b].real()) return values[a].real() < values[b].real();
    return std::abs(values[a].imag()) < std::abs(values[b].imag());
  });

  std::vector<bool> used(n, false);
  bool all_real = true;
  for (std::size_t i : order) {
    if (is_real(values[i], tol)) {
      used[i] = true;
      out.pairs.emplace_back(i, i);
    } else {
      all_real = false;
    }
  }
  if (all_real) {
    out.kind = SpectrumKind::all_real;
    return out;
  }

  bool perfect = true;
  for (std::size_t i : order) {
    if (used[i]) continue;
    used[i] = true;
    const Complex target = std::conj(values[i]);
    std::size_t best = n;
    double best_dist = 0.0;
    for (std::size_t j : order) {
      if (used[j] || (values[j].imag() > 0.0) == (values[i].imag() > 0.0)) continue;
      const double d = std::abs(values[j] - target);
      if (best == n || d < best_dist) {
        best = j;
        best_dist = d;
      }
    }
    if (best == n || best_dist > tol * std::max(1.0, std::abs(values[i]))) {
      perfect = false;
      continue;
    }
    used[best] = true;
    out.pairs.emplace_back(std::min(i, best), std::max(i, best));
  }
  out.kind = perfect ? SpectrumKind::conjugate_pairs : SpectrumKind::mixed;
  return out;
}

// ------------------------------------------------------------ construction

/// Scale v so that its largest-magnitude component (first one on ties) is 1.
inline CVector pivot_normalized(const CVector& v) {
  Eigen::Index pivot = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > best) {
      best = std::abs(v(i));
      pivot = i;
    }
  }
  return v / v(pivot);
}

/// η = Σ_n w_n |φ_n⟩⟨φ_n| over eigenvectors φ_n of H†. Each φ_n is scaled to a
/// unit pivot component; w_n = 1 unless `normalize`, where w_n = 1/‖φ_n‖².
inline MetricOperator spectral_metric(const CMatrix& h, bool normalize = false,
                                      double tol = kDefaultTol) {
  require_square(h, "spectral_metric");
  const EigenSystem es = eigendecompose(adjoint(h), tol);
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    if (!is_real(es.values(i), tol)) {
      throw ComplexSpectrum("spectral_metric: eigenvalue " + std::to_string(es.values(i).real()) +
                            (es.values(i).imag() < 0 ? " - " : " + ") +
                            std::to_string(std::abs(es.values(i).imag())) + "i is not real");
    }
  }
  const double cond = eigenvector_condition(es.vectors);
  if (!(cond <= kExceptionalConditionLimit)) {
    throw ExceptionalPoint("spectral_metric: eigenvector condition number " + std::to_string(cond) +
                           " exceeds 1e8");
  }

  const Eigen::Index n = h.rows();
  CMatrix eta = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const CVector phi = pivot_normalized(es.vectors.col(i));
    const double w = normalize ? 1.0 / phi.squaredNorm() : 1.0;
    eta.noalias() += w * phi * phi.adjoint();
  }
  eta = 0.5 * (eta + eta.adjoint()).eval();
  return MetricOperator::make(std::move(eta), Provenance::spectral);
}

/// Σ_i |u_i⟩⟨u_i| for closed-form adjoint spinors.
inline CMatrix metric_from_spinors(const AdjointSpinors& s) {
  return s.u1 * s.u1.adjoint() + s.u2 * s.u2.adjoint();
}

// ------------------------------------------------------------ verification

/// Smallest eigenvalue a metric must exceed to count as positive definite:
/// tol max(1, ‖η‖_F), so that rank-deficient matrices whose smallest
/// eigenvalue is rounding noise are reported as indefinite.
inline double positivity_floor(const CMatrix& eta, double tol) { return tol * scale_of(eta); }

/// Never throws on a failing metric; only on mismatched dimensions.
inline MetricReport check_metric(const CMatrix& h, const CMatrix& eta, double tol = kDefaultTol) {
  require_square(h, "check_metric");
  if (eta.rows() != h.rows() || eta.cols() != h.cols()) {
    throw DimensionMismatch("check_metric: η and H dimensions differ");
  }
  MetricReport r;
  r.relation_residual = (eta * h - h.adjoint() * eta).norm() / scale_of(h);
  r.hermiticity_residual = hermiticity_residual(eta);
  if (eta.allFinite() && h.allFinite()) {
    const CMatrix sym = 0.5 * (eta + eta.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym, Eigen::EigenvaluesOnly);
    r.min_eig = solver.info() == Eigen::Success ? solver.eigenvalues().minCoeff()
                                                : std::numeric_limits<double>::quiet_NaN();
  } else {
    r.relation_residual = std::numeric_limits<double>::infinity();
    r.min_eig = std::numeric_limits<double>::quiet_NaN();
  }
  if (!(r.relation_residual <= tol)) {
    r.verdict = Verdict::relation_violated;
  } else if (!(r.min_eig > positivity_floor(eta, tol))) {
    r.verdict = Verdict::indefinite;
  } else {
    r.verdict = Verdict::valid_metric;
  }
  return r;
}

inline MetricReport check_metric(const CMatrix& h, const MetricOperator& eta, double tol = kDefaultTol) {
  return check_metric(h, eta.eta(), tol);
}

/// ⟨f|η g⟩ = Σ_ij conj(f_i) η_ij g_j.
inline Complex eta_inner(const CVector& f, const CVector& g, const CMatrix& eta) {
  if (f.size() != g.size() || eta.rows() != f.size() || eta.cols() != f.size()) {
    throw DimensionMismatch("eta_inner: vector and metric dimensions differ");
  }
  return f.dot(eta * g);  // Eigen's dot conjugates the left operand
}

inline Complex eta_inner(const CVector& f, const CVector& g, const MetricOperator& eta) {
  return eta_inner(f, g, eta.eta());
}

// ------------------------------------------------------------ dynamics

/// U(t) = exp(−i t H / ħ).
inline CMatrix evolve(const CMatrix& h, double t, const PhysParams& pp) {
  pp.validate();
  if (!std::isfinite(t)) throw InvalidArgument("evolve: t must be finite");
  return mat_exp(Complex(0.0, -t / pp.hbar) * h);
}

/// ‖U†ηU − η‖_F / ‖η‖_F.
inline double pseudo_unitarity_residual(const CMatrix& u, const CMatrix& eta) {
  return (u.adjoint() * eta * u - eta).norm() / std::max(eta.norm(), std::numeric_limits<double>::min());
}

inline double unitarity_residual(const CMatrix& u) {
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm();
}

}  // namespace pseudospec
