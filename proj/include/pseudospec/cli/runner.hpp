#pragma once

// Command implementations behind the `pseudospec` executable. Every run_*
// function is a pure function of its RunConfig except for the optional
// wall-clock timing, which is off by default so output stays byte-stable.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "pseudospec/cli/record.hpp"
#include "pseudospec/gridsolver.hpp"
#include "pseudospec/metric.hpp"
#include "pseudospec/models.hpp"

namespace pseudospec::cli {

enum class Command { spectrum, metric, verify, reduce, sweep, evolve, converge };
enum class Model { rashba, scalar_const, scalar_grid };
enum class MetricMethod { spectral, paper, diagonal, spinor };

constexpr std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::spectrum: return "spectrum";
    case Command::metric: return "metric";
    case Command::verify: return "verify";
    case Command::reduce: return "reduce";
    case Command::sweep: return "sweep";
    case Command::evolve: return "evolve";
    case Command::converge: return "converge";
  }
  return "unknown";
}

constexpr std::string_view to_string(Model m) noexcept {
  switch (m) {
    case Model::rashba: return "rashba";
    case Model::scalar_const: return "scalar_const";
    case Model::scalar_grid: return "scalar_grid";
  }
  return "unknown";
}

constexpr std::string_view to_string(MetricMethod m) noexcept {
  switch (m) {
    case MetricMethod::spectral: return "spectral";
    case MetricMethod::paper: return "paper";
    case MetricMethod::diagonal: return "diagonal";
    case MetricMethod::spinor: return "spinor";
  }
  return "unknown";
}

/// Exit-code contract: 0 success, 2 usage/parameter, 3 solver failure, 4 regime violation.
constexpr int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::convergence_failure:
    case ErrorKind::exceptional_point:
    case ErrorKind::singular_denominator:
      return 3;
    case ErrorKind::complex_spectrum:
    case ErrorKind::not_positive_definite:
      return 4;
    default:
      return 2;
  }
}

/// Global tolerance default: PSEUDOSPEC_TOL when set to a positive number, else 1e-10.
inline double default_tolerance() {
  if (const char* env = std::getenv("PSEUDOSPEC_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("PSEUDOSPEC_TOL must be a positive number, got '" + std::string(env) + "'");
    }
    return v;
  }
  return kDefaultTol;
}

struct RunConfig {
  Command command = Command::spectrum;
  Model model = Model::rashba;
  PhysParams phys;

  // momentum-space models
  double lambda = 0.0;
  double kx = 0.0;
  double ky = 0.0;
  double v0 = 0.0;

  // scalar_grid
  PotentialFamily potential = PotentialFamily::constant;
  double g = 1.0;
  double mode = 1.0;
  double width = 0.5;
  std::string samples_path;
  double grid_half_length = std::numbers::pi;
  int grid_n = 64;
  Boundary bc = Boundary::periodic;
  Scheme scheme = Scheme::fourier;

  // metric
  std::vector<MetricMethod> methods;  // empty: every method applicable to the model
  bool normalize = false;

  // sweep
  std::string sweep_param;
  double sweep_from = 0.0;
  double sweep_to = 1.0;
  int sweep_steps = 101;

  // evolve / converge
  std::vector<double> times{0.1, 1.0, 10.0};
  std::vector<int> ns{32, 64, 128};

  OutputFormat format = OutputFormat::json;
  double tol = kDefaultTol;
  bool timing = false;
};

// ------------------------------------------------------------ helpers

namespace detail {

inline void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw InvalidArgument(std::string("--") + name + " must be finite");
}

inline void validate(const RunConfig& cfg) {
  cfg.phys.validate();
  require_finite(cfg.lambda, "lambda");
  require_finite(cfg.kx, "kx");
  require_finite(cfg.ky, "ky");
  require_finite(cfg.v0, "v0");
  require_finite(cfg.g, "g");
  require_finite(cfg.mode, "mode");
  require_finite(cfg.width, "width");
  if (!(cfg.tol > 0.0) || !std::isfinite(cfg.tol)) throw InvalidArgument("--tol must be positive");
  if (cfg.model == Model::scalar_grid) {
    if (cfg.potential == PotentialFamily::gaussian && !(cfg.width > 0.0)) {
      throw InvalidArgument("--width must be positive");
    }
    if (cfg.potential == PotentialFamily::samples && cfg.samples_path.empty()) {
      throw InvalidArgument("--potential samples requires --samples PATH");
    }
  }
}

inline PotentialSpec potential_of(const RunConfig& cfg) {
  switch (cfg.potential) {
    case PotentialFamily::constant: return PotentialSpec::constant(cfg.v0);
    case PotentialFamily::cosine: return PotentialSpec::cosine(cfg.g, cfg.mode);
    case PotentialFamily::gaussian: return PotentialSpec::gaussian(cfg.g, cfg.width);
    case PotentialFamily::samples: return load_potential_csv(cfg.samples_path);
  }
  throw InvalidArgument("unknown potential family");
}

inline Grid1D grid_of(const RunConfig& cfg) { return make_grid(cfg.grid_half_length, cfg.grid_n, cfg.bc); }

inline CMatrix hamiltonian(const RunConfig& cfg) {
  switch (cfg.model) {
    case Model::rashba: return build_rashba({cfg.kx, cfg.ky}, cfg.phys, {cfg.lambda});
    case Model::scalar_const: return build_scalar_const(cfg.kx, cfg.phys, {cfg.v0});
    case Model::scalar_grid:
      return build_dirac_grid(potential_of(cfg), grid_of(cfg), cfg.phys, cfg.scheme).matrix;
  }
  throw InvalidArgument("unknown model");
}

inline std::optional<EnergyPair> analytic_energies(const RunConfig& cfg) {
  switch (cfg.model) {
    case Model::rashba: return rashba_energy({cfg.kx, cfg.ky}, cfg.phys, {cfg.lambda});
    case Model::scalar_const: return scalar_energy(cfg.kx, cfg.phys, {cfg.v0});
    case Model::scalar_grid: return std::nullopt;
  }
  return std::nullopt;
}

inline Json params_json(const RunConfig& cfg) {
  std::map<std::string, Json> p;
  p["m0"] = cfg.phys.m0;
  p["c"] = cfg.phys.c;
  p["hbar"] = cfg.phys.hbar;
  p["tol"] = cfg.tol;
  switch (cfg.model) {
    case Model::rashba:
      p["lambda"] = cfg.lambda;
      p["kx"] = cfg.kx;
      p["ky"] = cfg.ky;
      break;
    case Model::scalar_const:
      p["v0"] = cfg.v0;
      p["kx"] = cfg.kx;
      break;
    case Model::scalar_grid:
      p["potential"] = std::string(to_string(cfg.potential));
      switch (cfg.potential) {
        case PotentialFamily::constant: p["v0"] = cfg.v0; break;
        case PotentialFamily::cosine:
          p["g"] = cfg.g;
          p["mode"] = cfg.mode;
          break;
        case PotentialFamily::gaussian:
          p["g"] = cfg.g;
          p["width"] = cfg.width;
          break;
        case PotentialFamily::samples: p["samples"] = cfg.samples_path; break;
      }
      p["grid_L"] = cfg.grid_half_length;
      p["grid_n"] = cfg.grid_n;
      p["bc"] = std::string(to_string(cfg.bc));
      p["scheme"] = std::string(to_string(cfg.scheme));
      break;
  }
  Json out = Json::object();
  for (auto& [k, v] : p) out[k] = v;
  return out;
}

inline ResultRecord base_record(const RunConfig& cfg) {
  ResultRecord r;
  r.command = std::string(to_string(cfg.command));
  r.model = std::string(to_string(cfg.model));
  r.params = params_json(cfg);
  return r;
}

inline std::vector<Complex> numeric_spectrum(const RunConfig& cfg) {
  return eigendecompose(hamiltonian(cfg), cfg.tol).spectrum();
}

inline std::vector<MetricMethod> methods_for(const RunConfig& cfg) {
  if (!cfg.methods.empty()) return cfg.methods;
  switch (cfg.model) {
    case Model::rashba:
      return {MetricMethod::spectral, MetricMethod::paper, MetricMethod::diagonal, MetricMethod::spinor};
    case Model::scalar_const: return {MetricMethod::spectral, MetricMethod::paper, MetricMethod::spinor};
    case Model::scalar_grid: return {MetricMethod::spectral};
  }
  return {MetricMethod::spectral};
}

struct Candidate {
  CMatrix eta;
  Provenance provenance;
};

inline Candidate metric_candidate(const RunConfig& cfg, const CMatrix& h, MetricMethod method) {
  const Momentum2 k{cfg.kx, cfg.ky};
  switch (method) {
    case MetricMethod::spectral:
      return {spectral_metric(h, cfg.normalize, cfg.tol).eta(), Provenance::spectral};
    case MetricMethod::paper:
      if (cfg.model == Model::rashba) return {eta_paper_rashba(k, cfg.phys, {cfg.lambda}), Provenance::paper_printed};
      if (cfg.model == Model::scalar_const) return {eta_paper_scalar(cfg.kx, cfg.phys, {cfg.v0}), Provenance::paper_printed};
      break;
    case MetricMethod::diagonal:
      if (cfg.model == Model::rashba) return {eta_diag_rashba(cfg.phys, {cfg.lambda}), Provenance::diagonal_derived};
      break;
    case MetricMethod::spinor:
      if (cfg.model == Model::rashba) {
        return {metric_from_spinors(rashba_adjoint_spinors(k, cfg.phys, {cfg.lambda})), Provenance::spectral};
      }
      if (cfg.model == Model::scalar_const) {
        return {metric_from_spinors(scalar_adjoint_spinors(cfg.kx, cfg.phys, {cfg.v0})), Provenance::spectral};
      }
      break;
  }
  throw InvalidArgument("metric method '" + std::string(to_string(method)) + "' is not available for model " +
                        std::string(to_string(cfg.model)));
}

// `required` checks decide all_pass; the others are reported for information.
inline Json check_json(const std::string& name, double value, double threshold, bool pass, bool required = true) {
  Json j = Json::object();
  j["name"] = name;
  j["value"] = value;
  j["threshold"] = threshold;
  j["pass"] = pass;
  j["required"] = required;
  return j;
}

inline Json check_at_most(const std::string& name, double value, double threshold, bool required = true) {
  return check_json(name, value, threshold, value <= threshold, required);
}

/// Sets a numeric model parameter by its CLI name.
inline void set_param(RunConfig& cfg, const std::string& name, double value) {
  static const std::map<std::string, std::function<void(RunConfig&, double)>> setters{
      {"m0", [](RunConfig& c, double v) { c.phys.m0 = v; }},
      {"c", [](RunConfig& c, double v) { c.phys.c = v; }},
      {"hbar", [](RunConfig& c, double v) { c.phys.hbar = v; }},
      {"lambda", [](RunConfig& c, double v) { c.lambda = v; }},
      {"kx", [](RunConfig& c, double v) { c.kx = v; }},
      {"ky", [](RunConfig& c, double v) { c.ky = v; }},
      {"v0", [](RunConfig& c, double v) { c.v0 = v; }},
      {"g", [](RunConfig& c, double v) { c.g = v; }},
      {"mode", [](RunConfig& c, double v) { c.mode = v; }},
      {"width", [](RunConfig& c, double v) { c.width = v; }},
  };
  const auto it = setters.find(name);
  if (it == setters.end()) throw InvalidArgument("cannot sweep unknown parameter '" + name + "'");
  it->second(cfg, value);
}

template <typename F>
void parallel_for(std::size_t count, F&& body) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count && !failed; i = next++) {
          try {
            body(i);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

// ------------------------------------------------------------ commands

inline ResultRecord run_spectrum(const RunConfig& cfg) {
  detail::validate(cfg);
  ResultRecord r = detail::base_record(cfg);
  r.eigenvalues = detail::numeric_spectrum(cfg);
  r.classification = std::string(to_string(classify_spectrum(r.eigenvalues, cfg.tol).kind));
  if (const auto e = detail::analytic_energies(cfg)) {
    const auto analytic = sorted_spectrum({e->plus, e->minus});
    r.extras["analytic_eigenvalues"] = complex_list_json(analytic);
    r.extras["analytic_mismatch"] = multiset_mismatch(r.eigenvalues, analytic);
  }
  return r;
}

inline ResultRecord run_metric(const RunConfig& cfg) {
  detail::validate(cfg);
  ResultRecord r = detail::base_record(cfg);
  const CMatrix h = detail::hamiltonian(cfg);
  r.eigenvalues = eigendecompose(h, cfg.tol).spectrum();
  r.classification = std::string(to_string(classify_spectrum(r.eigenvalues, cfg.tol).kind));

  Json reports = Json::array();
  for (MetricMethod method : detail::methods_for(cfg)) {
    const detail::Candidate cand = detail::metric_candidate(cfg, h, method);
    const MetricReport report = check_metric(h, cand.eta, cfg.tol);
    if (!r.metric_report) r.metric_report = report;
    Json entry = Json::object();
    entry["method"] = std::string(to_string(method));
    entry["provenance"] = std::string(to_string(cand.provenance));
    entry["report"] = metric_report_json(report);
    if (cand.eta.rows() <= 8) entry["eta"] = matrix_json(cand.eta);
    reports.push_back(std::move(entry));
  }
  r.extras["metric_reports"] = std::move(reports);
  return r;
}

inline ResultRecord run_verify(const RunConfig& cfg) {
  detail::validate(cfg);
  ResultRecord r = detail::base_record(cfg);
  Json checks = Json::array();
  const double tol = cfg.tol;

  if (cfg.model == Model::scalar_grid) {
    const Grid1D grid = detail::grid_of(cfg);
    const PotentialSpec pot = detail::potential_of(cfg);
    const Eigen::VectorXd v = pot.values_on(grid);
    checks.push_back(detail::check_at_most("potential_evenness", evenness_residual(v, grid), pot.parity_tol));
    const DiracGridOperator op = build_dirac_grid(pot, grid, cfg.phys, cfg.scheme);
    const ReducedOperator red = build_reduced(pot, grid, cfg.phys, cfg.scheme);
    checks.push_back(detail::check_at_most("grid_parity_pseudo_hermiticity", grid_parity_residual(op), 1e-12));
    checks.push_back(detail::check_at_most("reduced_reflection_conjugation",
                                           reflection_conjugation_residual(red.matrix, grid), 1e-12));
    r.eigenvalues = eigendecompose(op.matrix, tol).spectrum();
    const auto eps = eigendecompose(red.matrix, tol).spectrum();
    checks.push_back(detail::check_at_most("reduction_identity", reduction_mismatch(r.eigenvalues, eps, cfg.phys), 1e-8));
    const SpectrumKind eps_kind = classify_spectrum(eps, 1e-8).kind;
    checks.push_back(detail::check_json("reduced_conjugate_closure", eps_kind == SpectrumKind::mixed ? 1.0 : 0.0, 0.0,
                                        eps_kind != SpectrumKind::mixed));
  } else {
    const CMatrix h = detail::hamiltonian(cfg);
    const CMatrix beta = parity_matrix({}, 1);
    RunConfig reflected = cfg;
    reflected.kx = -cfg.kx;
    reflected.ky = -cfg.ky;
    const CMatrix h_reflected = detail::hamiltonian(reflected);
    r.eigenvalues = eigendecompose(h, tol).spectrum();
    const auto e = detail::analytic_energies(cfg);
    checks.push_back(detail::check_at_most("closed_form_spectrum",
                                           multiset_mismatch(r.eigenvalues, {e->plus, e->minus}), tol));
    // β H(k) β⁻¹ = H(k)† at fixed k, and β H(−k) β⁻¹ = H(k)† with p → −p. Model II
    // satisfies the second; model I is parity invariant instead (β H(−k) β = H(k)),
    // so for it both are informational and the diagonal metric carries the claim.
    const bool scalar = cfg.model == Model::scalar_const;
    checks.push_back(detail::check_at_most("parity_fixed_k", conjugation_residual(beta, h, h.adjoint()), tol, false));
    checks.push_back(detail::check_at_most("parity_reflected_k",
                                           frob_distance(beta * h_reflected * beta, h.adjoint()) / scale_of(h), tol,
                                           scalar));
    if (!scalar) {
      checks.push_back(detail::check_at_most("parity_invariance",
                                             frob_distance(beta * h_reflected * beta, h) / scale_of(h), tol, false));
    }
    if (cfg.model == Model::rashba && std::abs(cfg.lambda) < cfg.phys.c) {
      const MetricReport diag = check_metric(h, eta_diag_rashba(cfg.phys, {cfg.lambda}), tol);
      checks.push_back(detail::check_at_most("diagonal_metric_relation", diag.relation_residual, tol));
    }
    try {
      const AdjointSpinors s = cfg.model == Model::rashba
                                   ? rashba_adjoint_spinors({cfg.kx, cfg.ky}, cfg.phys, {cfg.lambda})
                                   : scalar_adjoint_spinors(cfg.kx, cfg.phys, {cfg.v0});
      checks.push_back(detail::check_at_most("adjoint_spinor_residual", s.residual, kSpinorResidualTol));
    } catch (const ExceptionalPoint&) {
      checks.push_back(detail::check_json("adjoint_spinor_residual", std::numeric_limits<double>::infinity(),
                                          kSpinorResidualTol, false));
    }
  }
  r.classification = std::string(to_string(classify_spectrum(r.eigenvalues, tol).kind));
  if (r.classification == "all_real") {
    try {
      const CMatrix h = detail::hamiltonian(cfg);
      r.metric_report = check_metric(h, spectral_metric(h, cfg.normalize, tol), tol);
    } catch (const ExceptionalPoint&) {
      // eigenvectors too close to parallel for a spectral metric; report without one
    }
  }
  bool all_pass = true;
  for (const auto& c : checks) all_pass = all_pass && (!c.at("required").get<bool>() || c.at("pass").get<bool>());
  r.extras["checks"] = std::move(checks);
  r.extras["all_pass"] = all_pass;
  return r;
}

inline ResultRecord run_reduce(const RunConfig& cfg) {
  detail::validate(cfg);
  if (cfg.model != Model::scalar_grid) throw InvalidArgument("reduce requires --model scalar_grid");
  ResultRecord r = detail::base_record(cfg);
  const Grid1D grid = detail::grid_of(cfg);
  const PotentialSpec pot = detail::potential_of(cfg);
  const DiracGridOperator op = build_dirac_grid(pot, grid, cfg.phys, cfg.scheme);
  const ReducedOperator red = build_reduced(pot, grid, cfg.phys, cfg.scheme);
  r.eigenvalues = eigendecompose(op.matrix, cfg.tol).spectrum();
  r.classification = std::string(to_string(classify_spectrum(r.eigenvalues, cfg.tol).kind));
  const auto eps = eigendecompose(red.matrix, cfg.tol).spectrum();
  r.extras["reduced_eigenvalues"] = complex_list_json(eps);
  r.extras["reduced_classification"] = std::string(to_string(classify_spectrum(eps, 1e-8).kind));
  r.extras["mapped_energies"] = complex_list_json(sorted_spectrum(reduced_to_dirac_energies(eps, cfg.phys)));
  r.extras["reduction_mismatch"] = reduction_mismatch(r.eigenvalues, eps, cfg.phys);
  return r;
}

/// Scans the sweep range, then bisects the first reality transition to
/// relative width 1e-12.
inline ResultRecord run_sweep(const RunConfig& cfg) {
  detail::validate(cfg);
  if (cfg.sweep_param.empty()) throw InvalidArgument("sweep requires --sweep-param");
  if (cfg.sweep_steps < 2) throw InvalidArgument("--steps must be at least 2");
  detail::require_finite(cfg.sweep_from, "from");
  detail::require_finite(cfg.sweep_to, "to");
  {
    RunConfig probe = cfg;
    detail::set_param(probe, cfg.sweep_param, cfg.sweep_from);  // rejects unknown names early
  }

  const auto steps = static_cast<std::size_t>(cfg.sweep_steps);
  auto value_at = [&](std::size_t i) {
    if (i + 1 == steps) return cfg.sweep_to;
    return cfg.sweep_from + (cfg.sweep_to - cfg.sweep_from) * static_cast<double>(i) / static_cast<double>(steps - 1);
  };
  auto spectrum_at = [&](double value) {
    RunConfig point = cfg;
    detail::set_param(point, cfg.sweep_param, value);
    detail::validate(point);
    return detail::numeric_spectrum(point);
  };
  auto real_at = [&](double value) {
    return classify_spectrum(spectrum_at(value), cfg.tol).kind == SpectrumKind::all_real;
  };

  struct Point {
    double value = 0.0;
    std::vector<Complex> eigenvalues;
    SpectrumKind kind = SpectrumKind::all_real;
  };
  std::vector<Point> points(steps);
  detail::parallel_for(steps, [&](std::size_t i) {
    points[i].value = value_at(i);
    points[i].eigenvalues = spectrum_at(points[i].value);
    points[i].kind = classify_spectrum(points[i].eigenvalues, cfg.tol).kind;
  });

  ResultRecord r = detail::base_record(cfg);
  r.eigenvalues = points.back().eigenvalues;
  r.classification = std::string(to_string(points.back().kind));

  for (std::size_t i = 0; i + 1 < steps; ++i) {
    const bool real_lo = points[i].kind == SpectrumKind::all_real;
    const bool real_hi = points[i + 1].kind == SpectrumKind::all_real;
    if (real_lo == real_hi) continue;
    double lo = points[i].value;
    double hi = points[i + 1].value;
    for (int iter = 0; iter < 200; ++iter) {
      if (std::abs(hi - lo) <= 1e-12 * std::max({std::abs(lo), std::abs(hi), 1e-300})) break;
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (real_at(mid) == real_lo ? lo : hi) = mid;
    }
    r.threshold = Threshold{cfg.sweep_param, 0.5 * (lo + hi), real_lo ? "real_to_complex" : "complex_to_real",
                            std::min(lo, hi), std::max(lo, hi)};
    break;
  }

  Json sweep = Json::object();
  sweep["param"] = cfg.sweep_param;
  sweep["from"] = cfg.sweep_from;
  sweep["to"] = cfg.sweep_to;
  sweep["steps"] = cfg.sweep_steps;
  r.extras["sweep"] = std::move(sweep);
  if (!r.threshold) r.extras["threshold_status"] = "no threshold in range";
  Json pts = Json::array();
  for (const Point& p : points) {
    Json j = Json::object();
    j["value"] = p.value;
    j["classification"] = std::string(to_string(p.kind));
    j["eigenvalues"] = complex_list_json(p.eigenvalues);
    pts.push_back(std::move(j));
  }
  r.extras["points"] = std::move(pts);
  return r;
}

inline ResultRecord run_evolve(const RunConfig& cfg) {
  detail::validate(cfg);
  ResultRecord r = detail::base_record(cfg);
  const CMatrix h = detail::hamiltonian(cfg);
  r.eigenvalues = eigendecompose(h, cfg.tol).spectrum();
  const SpectrumKind kind = classify_spectrum(r.eigenvalues, cfg.tol).kind;
  r.classification = std::string(to_string(kind));
  if (kind != SpectrumKind::all_real) {
    throw ComplexSpectrum("evolve: spectrum is not real, no conserved positive metric exists");
  }
  const MetricOperator eta = spectral_metric(h, cfg.normalize, cfg.tol);
  r.metric_report = check_metric(h, eta, cfg.tol);

  Json rows = Json::array();
  for (double t : cfg.times) {
    detail::require_finite(t, "t");
    const CMatrix u = evolve(h, t, cfg.phys);
    Json row = Json::object();
    row["t"] = t;
    row["unitarity_residual"] = unitarity_residual(u);
    row["pseudo_unitarity_residual"] = pseudo_unitarity_residual(u, eta.eta());
    rows.push_back(std::move(row));
  }
  r.extras["evolution"] = std::move(rows);
  return r;
}

inline ResultRecord run_converge(const RunConfig& cfg) {
  detail::validate(cfg);
  if (cfg.model != Model::scalar_grid) throw InvalidArgument("converge requires --model scalar_grid");
  if (cfg.bc != Boundary::periodic) throw InvalidArgument("converge uses periodic grids only");
  ResultRecord r = detail::base_record(cfg);
  ConvergenceOptions opts;
  opts.half_length = cfg.grid_half_length;
  opts.tol = cfg.tol;
  const ConvergenceTable table = convergence_study(detail::potential_of(cfg), cfg.phys, cfg.ns, cfg.scheme, opts);
  r.eigenvalues = {table.reference};
  r.classification = std::string(to_string(classify_spectrum(r.eigenvalues, cfg.tol).kind));
  Json rows = Json::array();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const ConvergenceRow& row = table.rows[i];
    Json j = Json::object();
    j["n"] = row.n;
    j["eigenvalue"] = complex_json(row.eigenvalue);
    j["error"] = row.error;
    j["ratio"] = i == 0 || row.error == 0.0 ? Json(nullptr) : Json(table.rows[i - 1].error / row.error);
    rows.push_back(std::move(j));
  }
  Json conv = Json::object();
  conv["reference_n"] = table.reference_n;
  conv["reference"] = complex_json(table.reference);
  conv["rows"] = std::move(rows);
  r.extras["convergence"] = std::move(conv);
  return r;
}

inline ResultRecord run(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ResultRecord r;
  switch (cfg.command) {
    case Command::spectrum: r = run_spectrum(cfg); break;
    case Command::metric: r = run_metric(cfg); break;
    case Command::verify: r = run_verify(cfg); break;
    case Command::reduce: r = run_reduce(cfg); break;
    case Command::sweep: r = run_sweep(cfg); break;
    case Command::evolve: r = run_evolve(cfg); break;
    case Command::converge: r = run_converge(cfg); break;
  }
  if (cfg.timing) {
    r.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  }
  return r;
}

/// Machine-readable error record written to stderr by the executable.
inline std::string error_json(std::string_view kind, const std::string& message, int exit_code) {
  Json j = Json::object();
  j["error"] = std::string(kind);
  j["message"] = message;
  j["exit_code"] = exit_code;
  return dump_json(j);
}

}  // namespace pseudospec::cli
