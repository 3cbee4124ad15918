#pragma once

// Position-space version of the 1+1-D scalar model for an arbitrary even V(x):
// symmetric grids, derivative matrices, the 2N x 2N Dirac operator
//   [[m0c^2 I, cP + V], [cP - V, -m0c^2 I]],  P = -i hbar D,
// the reduced Schrodinger-type operator obtained by eliminating the lower
// component, and convergence studies.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "pseudospec/metric.hpp"
#include "pseudospec/models.hpp"
#include "pseudospec/numkit.hpp"

namespace pseudospec {

enum class Boundary { periodic, dirichlet };
enum class Scheme { central2, fourier };
enum class ReducedForm { product_exact, analytic_U };

constexpr std::string_view to_string(Boundary b) noexcept {
  return b == Boundary::periodic ? "periodic" : "dirichlet";
}
constexpr std::string_view to_string(Scheme s) noexcept {
  return s == Scheme::central2 ? "central2" : "fourier";
}
constexpr std::string_view to_string(ReducedForm f) noexcept {
  return f == ReducedForm::product_exact ? "product_exact" : "analytic_U";
}

// ------------------------------------------------------------------ grid

/// Grid symmetric under x -> -x.
///  periodic:  x_j = -L + j dx, dx = 2L/N, reflection j -> (N - j) mod N
///  dirichlet: odd N, x_j = -L + (j + 1) dx, dx = 2L/(N + 1), endpoints excluded,
///             reflection j -> N - 1 - j
class Grid1D {
 public:
  Grid1D(double half_length, int n_points, Boundary bc)
      : half_length_(half_length), n_(n_points), bc_(bc) {
    if (!(half_length > 0.0) || !std::isfinite(half_length)) {
      throw AsymmetricGrid("make_grid: half-length must be positive and finite");
    }
    if (n_points < 8) throw AsymmetricGrid("make_grid: need at least 8 points");
    if (bc == Boundary::dirichlet && n_points % 2 == 0) {
      throw AsymmetricGrid("make_grid: dirichlet grids need odd N so that x = 0 is a grid point");
    }
    points_.resize(static_cast<std::size_t>(n_points));
    if (bc == Boundary::periodic) {
      spacing_ = 2.0 * half_length / n_points;
      for (int j = 0; j < n_points; ++j) points_[j] = -half_length + j * spacing_;
    } else {
      spacing_ = 2.0 * half_length / (n_points + 1);
      const int mid = n_points / 2;
      for (int j = 0; j < n_points; ++j) points_[j] = (j - mid) * spacing_;
    }
  }

  double half_length() const noexcept { return half_length_; }
  int size() const noexcept { return n_; }
  Boundary boundary() const noexcept { return bc_; }
  double spacing() const noexcept { return spacing_; }
  const std::vector<double>& points() const noexcept { return points_; }
  double operator[](int j) const { return points_[static_cast<std::size_t>(j)]; }

  int reflect(int j) const noexcept {
    return bc_ == Boundary::periodic ? (n_ - j) % n_ : n_ - 1 - j;
  }

 private:
  double half_length_;
  int n_;
  Boundary bc_;
  double spacing_ = 0.0;
  std::vector<double> points_;
};

inline Grid1D make_grid(double half_length, int n_points, Boundary bc = Boundary::periodic) {
  return Grid1D(half_length, n_points, bc);
}

/// Permutation matrix R with (R f)_j = f_{reflect(j)}.
inline CMatrix reflection_matrix(const Grid1D& grid) {
  const int n = grid.size();
  CMatrix r = CMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) r(j, grid.reflect(j)) = 1.0;
  return r;
}

// ------------------------------------------------------------- potential

enum class PotentialFamily { constant, cosine, gaussian, samples };

constexpr std::string_view to_string(PotentialFamily f) noexcept {
  switch (f) {
    case PotentialFamily::constant: return "constant";
    case PotentialFamily::cosine: return "cosine";
    case PotentialFamily::gaussian: return "gaussian";
    case PotentialFamily::samples: return "samples";
  }
  return "unknown";
}

inline constexpr double kAnalyticParityTol = 1e-12;
inline constexpr double kSampledParityTol = 1e-8;

/// V(x) families:
///   constant(v0)          V = v0
///   cosine(g, m)          V = g cos(m x)
///   gaussian(g, w)        V = g exp(-x^2 / (2 w^2))
///   samples(x_j, V_j)     values given on the grid points, no interpolation
struct PotentialSpec {
  PotentialFamily family = PotentialFamily::constant;
  double strength = 0.0;  // v0 for constant, g otherwise
  double mode = 1.0;
  double width = 1.0;
  std::vector<double> sample_x;
  std::vector<double> sample_v;
  std::string source;
  double parity_tol = kAnalyticParityTol;

  static PotentialSpec constant(double v0) {
    PotentialSpec p;
    p.family = PotentialFamily::constant;
    p.strength = v0;
    return p;
  }
  static PotentialSpec cosine(double g, double mode) {
    PotentialSpec p;
    p.family = PotentialFamily::cosine;
    p.strength = g;
    p.mode = mode;
    return p;
  }
  static PotentialSpec gaussian(double g, double width) {
    if (!(width > 0.0)) throw InvalidArgument("gaussian potential: width must be positive");
    PotentialSpec p;
    p.family = PotentialFamily::gaussian;
    p.strength = g;
    p.width = width;
    return p;
  }
  static PotentialSpec sampled(std::vector<double> xs, std::vector<double> vs, std::string source = {}) {
    if (xs.size() != vs.size()) throw InvalidArgument("sampled potential: x and V lengths differ");
    PotentialSpec p;
    p.family = PotentialFamily::samples;
    p.sample_x = std::move(xs);
    p.sample_v = std::move(vs);
    p.source = std::move(source);
    p.parity_tol = kSampledParityTol;
    return p;
  }

  double value(double x) const {
    switch (family) {
      case PotentialFamily::constant: return strength;
      case PotentialFamily::cosine: return strength * std::cos(mode * x);
      case PotentialFamily::gaussian: return strength * std::exp(-x * x / (2.0 * width * width));
      case PotentialFamily::samples: break;
    }
    throw InvalidArgument("sampled potential has no closed form");
  }

  double derivative(double x) const {
    switch (family) {
      case PotentialFamily::constant: return 0.0;
      case PotentialFamily::cosine: return -strength * mode * std::sin(mode * x);
      case PotentialFamily::gaussian: return -x / (width * width) * value(x);
      case PotentialFamily::samples: break;
    }
    throw NoAnalyticDerivative("sampled potential has no analytic derivative");
  }

  Eigen::VectorXd values_on(const Grid1D& grid) const {
    const int n = grid.size();
    Eigen::VectorXd v(n);
    if (family != PotentialFamily::samples) {
      for (int j = 0; j < n; ++j) v(j) = value(grid[j]);
      return v;
    }
    if (static_cast<int>(sample_v.size()) != n) {
      throw InvalidArgument("sampled potential has " + std::to_string(sample_v.size()) +
                            " points, grid has " + std::to_string(n));
    }
    const double match_tol = 1e-12 * std::max(1.0, grid.half_length());
    for (int j = 0; j < n; ++j) {
      if (std::abs(sample_x[j] - grid[j]) > match_tol) {
        throw InvalidArgument("sampled potential point " + std::to_string(j) + " (x = " +
                              std::to_string(sample_x[j]) + ") does not match the grid");
      }
      v(j) = sample_v[j];
    }
    return v;
  }

  Eigen::VectorXd derivative_on(const Grid1D& grid) const {
    Eigen::VectorXd d(grid.size());
    for (int j = 0; j < grid.size(); ++j) d(j) = derivative(grid[j]);
    return d;
  }
};

/// max_j |V_j − V_{R j}| / max_j |V_j| (0 for V ≡ 0).
inline double evenness_residual(const Eigen::VectorXd& v, const Grid1D& grid) {
  double worst = 0.0;
  for (int j = 0; j < grid.size(); ++j) worst = std::max(worst, std::abs(v(j) - v(grid.reflect(j))));
  const double peak = v.cwiseAbs().maxCoeff();
  return peak == 0.0 ? 0.0 : worst / peak;
}

inline Eigen::VectorXd even_samples(const PotentialSpec& pot, const Grid1D& grid) {
  Eigen::VectorXd v = pot.values_on(grid);
  if (!v.allFinite()) throw InvalidArgument("potential has non-finite samples");
  const double odd = evenness_residual(v, grid);
  if (odd > pot.parity_tol) {
    throw OddPotential("potential is not even on the grid: relative asymmetry " + std::to_string(odd) +
                       " exceeds " + std::to_string(pot.parity_tol));
  }
  return v;
}

/// Two-column CSV with header `x,V`.
inline PotentialSpec load_potential_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open potential file " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("potential file " + path + " is empty");
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,V") throw InvalidArgument("potential file " + path + ": header must be `x,V`");

  std::vector<double> xs;
  std::vector<double> vs;
  int lineno = 1;
  auto parse = [&](std::string_view text, double& out) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    double x = 0.0;
    double v = 0.0;
    if (comma == std::string::npos || !parse(std::string_view(line).substr(0, comma), x) ||
        !parse(std::string_view(line).substr(comma + 1), v)) {
      throw InvalidArgument("potential file " + path + ": malformed row at line " + std::to_string(lineno));
    }
    xs.push_back(x);
    vs.push_back(v);
  }
  return PotentialSpec::sampled(std::move(xs), std::move(vs), path);
}

// ------------------------------------------------------------ derivatives

/// Real antisymmetric first-derivative matrix with R D R = −D.
///  central2: (f_{j+1} − f_{j−1}) / 2dx, periodic wrap or zero outside (dirichlet)
///  fourier:  derivative of the trigonometric interpolant (periodic only); for
///            even N the Nyquist mode is differentiated to zero
inline Eigen::MatrixXd derivative_matrix_real(const Grid1D& grid, Scheme scheme) {
  const int n = grid.size();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  if (scheme == Scheme::central2) {
    const double inv = 1.0 / (2.0 * grid.spacing());
    for (int j = 0; j < n; ++j) {
      if (grid.boundary() == Boundary::periodic) {
        d(j, (j + 1) % n) = inv;
        d(j, (j + n - 1) % n) = -inv;
      } else {
        if (j + 1 < n) d(j, j + 1) = inv;
        if (j > 0) d(j, j - 1) = -inv;
      }
    }
    return d;
  }
  if (grid.boundary() != Boundary::periodic) {
    throw SchemeBoundaryMismatch("fourier differentiation requires a periodic grid");
  }
  const double h = 2.0 * std::numbers::pi / n;
  const double to_physical = std::numbers::pi / grid.half_length();
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      const double sign = ((j - k) % 2 == 0) ? 1.0 : -1.0;
      const double half_angle = 0.5 * (j - k) * h;
      const double entry = n % 2 == 0 ? 0.5 * sign / std::tan(half_angle) : 0.5 * sign / std::sin(half_angle);
      d(j, k) = entry * to_physical;
    }
  }
  // exact antisymmetry
  const Eigen::MatrixXd anti = 0.5 * (d - d.transpose());
  return anti;
}

inline CMatrix derivative_matrix(const Grid1D& grid, Scheme scheme) {
  return derivative_matrix_real(grid, scheme).cast<Complex>();
}

// ------------------------------------------------------------ operators

struct DiracGridOperator {
  CMatrix matrix;
  Grid1D grid;
  Scheme scheme;
  Eigen::VectorXd potential;
};

struct ReducedOperator {
  CMatrix matrix;
  ReducedForm form;
};

namespace detail {

// B = cP + V and C = cP − V with P = −iħD.
inline std::pair<CMatrix, CMatrix> coupling_blocks(const Eigen::VectorXd& v, const Grid1D& grid,
                                                   const PhysParams& pp, Scheme scheme) {
  const CMatrix cp = Complex(0.0, -pp.c * pp.hbar) * derivative_matrix(grid, scheme);
  const CMatrix vd = v.cast<Complex>().asDiagonal();
  return {cp + vd, cp - vd};
}

}  // namespace detail

/// Assembles the Dirac operator from raw samples without the evenness gate.
inline DiracGridOperator assemble_dirac(const Eigen::VectorXd& v, const Grid1D& grid, const PhysParams& pp,
                                        Scheme scheme) {
  pp.validate();
  if (v.size() != grid.size()) throw DimensionMismatch("assemble_dirac: sample count differs from grid");
  const int n = grid.size();
  const double mc2 = pp.rest_energy();
  auto [b, c] = detail::coupling_blocks(v, grid, pp, scheme);
  CMatrix h(2 * n, 2 * n);
  h.topLeftCorner(n, n) = mc2 * CMatrix::Identity(n, n);
  h.topRightCorner(n, n) = b;
  h.bottomLeftCorner(n, n) = c;
  h.bottomRightCorner(n, n) = -mc2 * CMatrix::Identity(n, n);
  return {std::move(h), grid, scheme, v};
}

inline DiracGridOperator build_dirac_grid(const PotentialSpec& pot, const Grid1D& grid, const PhysParams& pp,
                                          Scheme scheme) {
  return assemble_dirac(even_samples(pot, grid), grid, pp, scheme);
}

/// Grid parity P_D = diag(R, −R).
inline CMatrix dirac_parity(const Grid1D& grid) {
  const int n = grid.size();
  const CMatrix r = reflection_matrix(grid);
  CMatrix p = CMatrix::Zero(2 * n, 2 * n);
  p.topLeftCorner(n, n) = r;
  p.bottomRightCorner(n, n) = -r;
  return p;
}

/// ‖P_D H P_D⁻¹ − H†‖_F / ‖H‖_F.
inline double grid_parity_residual(const DiracGridOperator& op) {
  const CMatrix p = dirac_parity(op.grid);
  // P_D is an involution
  return (p * op.matrix * p - op.matrix.adjoint()).norm() / scale_of(op.matrix);
}

inline ReducedOperator assemble_reduced(const Eigen::VectorXd& v, const Grid1D& grid, const PhysParams& pp,
                                        Scheme scheme) {
  pp.validate();
  auto [b, c] = detail::coupling_blocks(v, grid, pp, scheme);
  return {b * c, ReducedForm::product_exact};
}

/// product_exact: (cP + V)(cP − V), whose spectrum maps exactly onto the Dirac
/// spectrum through E² = ε + m0²c⁴.
/// analytic_U:   −c²ħ²D² + diag(i c ħ V′ − V²) with V′ evaluated analytically.
inline ReducedOperator build_reduced(const PotentialSpec& pot, const Grid1D& grid, const PhysParams& pp,
                                     Scheme scheme, ReducedForm form = ReducedForm::product_exact) {
  const Eigen::VectorXd v = even_samples(pot, grid);
  if (form == ReducedForm::product_exact) return assemble_reduced(v, grid, pp, scheme);

  const Eigen::VectorXd dv = pot.derivative_on(grid);  // throws NoAnalyticDerivative for samples
  const CMatrix d = derivative_matrix(grid, scheme);
  const double c2h2 = pp.c * pp.c * pp.hbar * pp.hbar;
  CMatrix u = -c2h2 * (d * d);
  for (int j = 0; j < grid.size(); ++j) {
    u(j, j) += Complex(-v(j) * v(j), pp.c * pp.hbar * dv(j));
  }
  return {std::move(u), ReducedForm::analytic_U};
}

/// ‖R U R − conj(U)‖_F / ‖U‖_F.
inline double reflection_conjugation_residual(const CMatrix& u, const Grid1D& grid) {
  const CMatrix r = reflection_matrix(grid);
  return (r * u * r - u.conjugate()).norm() / scale_of(u);
}

/// Both roots ±sqrt(ε + m0²c⁴) for each ε, principal branch.
inline std::vector<Complex> reduced_to_dirac_energies(const std::vector<Complex>& eps, const PhysParams& pp) {
  pp.validate();
  const double mc2 = pp.rest_energy();
  std::vector<Complex> out;
  out.reserve(2 * eps.size());
  for (const Complex& e : eps) {
    const Complex root = std::sqrt(e + mc2 * mc2);
    out.push_back(root);
    out.push_back(-root);
  }
  return out;
}

/// Largest relative distance max |a − b| / max(1, |a|) under a greedy
/// nearest-neighbour matching of two equally sized multisets (infinity if the
/// sizes differ).
inline double multiset_mismatch(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  a = sorted_spectrum(std::move(a));
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const Complex& x : a) {
    std::size_t best = b.size();
    double best_d = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(x - b[j]);
      if (best == b.size() || d < best_d) {
        best = j;
        best_d = d;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_d / std::max(1.0, std::abs(x)));
  }
  return worst;
}

inline constexpr double kEliminationExclusion = 1e-8;

/// Mismatch between a Dirac spectrum and the energies mapped from a reduced
/// spectrum, ignoring values within `exclusion` of E = −m0c².
inline double reduction_mismatch(const std::vector<Complex>& dirac, const std::vector<Complex>& eps,
                                 const PhysParams& pp, double exclusion = kEliminationExclusion) {
  const double mc2 = pp.rest_energy();
  auto keep = [&](const std::vector<Complex>& in) {
    std::vector<Complex> out;
    for (const Complex& e : in) {
      if (std::abs(e + mc2) > exclusion * std::max(1.0, mc2)) out.push_back(e);
    }
    return out;
  };
  return multiset_mismatch(keep(dirac), keep(reduced_to_dirac_energies(eps, pp)));
}

// ------------------------------------------------------------ convergence

struct ConvergenceRow {
  int n = 0;
  Complex eigenvalue;
  double error = 0.0;
};

struct ConvergenceTable {
  Complex reference;
  int reference_n = 0;
  std::vector<ConvergenceRow> rows;
};

struct ConvergenceOptions {
  double half_length = std::numbers::pi;
  int reference_n = 0;  // 0: twice the largest N
  double tol = kDefaultTol;
};

/// The tracked level: smallest |E| with Re E > 0 among eigenvalues off the
/// threshold E² = m0²c⁴ (threshold modes, e.g. zero modes of cP − V, are
/// reproduced exactly by every scheme). Ties go to Im E >= 0.
inline Complex tracked_level(const std::vector<Complex>& energies, const PhysParams& pp) {
  const double m2 = pp.rest_energy() * pp.rest_energy();
  const double gap_tol = 1e-6 * std::max(1.0, m2);
  std::optional<Complex> best;
  for (const Complex& e : energies) {
    if (e.real() <= 0.0 || std::abs(e * e - m2) <= gap_tol) continue;
    if (!best) {
      best = e;
      continue;
    }
    const double da = std::abs(e);
    const double db = std::abs(*best);
    if (da < db * (1.0 - 1e-9) || (std::abs(da - db) <= 1e-9 * db && e.imag() > best->imag())) best = e;
  }
  if (!best) throw ConvergenceFailure("convergence_study: no trackable eigenvalue off threshold");
  return *best;
}

/// Error of the tracked level on each periodic grid of size N against a
/// fourier-scheme reference at `reference_n` points (obtained from the reduced
/// operator through the exact energy mapping).
inline ConvergenceTable convergence_study(const PotentialSpec& pot, const PhysParams& pp,
                                          const std::vector<int>& ns, Scheme scheme,
                                          const ConvergenceOptions& opts = {}) {
  if (ns.empty()) throw InvalidArgument("convergence_study: no grid sizes given");
  if (!std::is_sorted(ns.begin(), ns.end()) ||
      std::adjacent_find(ns.begin(), ns.end()) != ns.end()) {
    throw InvalidArgument("convergence_study: grid sizes must be strictly ascending");
  }
  ConvergenceTable table;
  table.reference_n = opts.reference_n > 0 ? opts.reference_n : 2 * ns.back();
  {
    const Grid1D ref_grid = make_grid(opts.half_length, table.reference_n, Boundary::periodic);
    const ReducedOperator red = build_reduced(pot, ref_grid, pp, Scheme::fourier);
    const auto eps = eigendecompose(red.matrix, opts.tol).spectrum();
    table.reference = tracked_level(reduced_to_dirac_energies(eps, pp), pp);
  }
  for (int n : ns) {
    const Grid1D grid = make_grid(opts.half_length, n, Boundary::periodic);
    const DiracGridOperator op = build_dirac_grid(pot, grid, pp, scheme);
    const Complex level = tracked_level(eigendecompose(op.matrix, opts.tol).spectrum(), pp);
    table.rows.push_back({n, level, std::abs(level - table.reference)});
  }
  return table;
}

}  // namespace pseudospec
