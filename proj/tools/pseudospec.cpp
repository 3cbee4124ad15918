// pseudospec: spectra, metric certification, grid reductions and parameter
// sweeps for the two pseudo-Hermitian Dirac models.
//
//   pseudospec <command> --model <m> [options]
//
// Results go to stdout (or --out); errors go to stderr as one JSON object and
// set the exit code (2 usage/parameter, 3 solver failure, 4 regime violation).

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pseudospec/cli/runner.hpp"

namespace ps = pseudospec;
namespace cli = pseudospec::cli;

namespace {

int fail(std::string_view kind, const std::string& message, int code) {
  std::cerr << cli::error_json(kind, message, code);
  return code;
}

std::string lowercase(std::string s) {
  for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

// Case-insensitive lookup of an enum by its printed name.
template <typename E, typename Name>
E parse_enum(const std::string& text, std::initializer_list<E> values, Name name_of, const char* flag) {
  const std::string lower = lowercase(text);
  for (E v : values) {
    if (name_of(v) == lower) return v;
  }
  throw ps::InvalidArgument(std::string(flag) + ": unknown value '" + text + "'");
}

}  // namespace

int main(int argc, char** argv) {
  cli::RunConfig cfg;
  try {
    cfg.tol = cli::default_tolerance();
  } catch (const ps::Error& e) {
    return fail(e.name(), e.what(), cli::exit_code_for(e.kind()));
  }

  CLI::App app{"Spectra and metric operators of pseudo-Hermitian Dirac Hamiltonians"};
  app.set_help_flag("-h,--help", "Print this help and exit");

  std::string command, model, potential = "constant", bc = "periodic", scheme = "fourier", format = "json";
  app.add_option("command", command, "spectrum | metric | verify | reduce | sweep | evolve | converge")->required();
  app.add_option("--model", model, "rashba | scalar_const | scalar_grid")->required();

  app.add_option("--m0", cfg.phys.m0, "Rest mass")->capture_default_str();
  app.add_option("--c", cfg.phys.c, "Speed of light")->capture_default_str();
  app.add_option("--hbar", cfg.phys.hbar, "Reduced Planck constant")->capture_default_str();

  app.add_option("--lambda", cfg.lambda, "Rashba coupling (rashba)");
  app.add_option("--kx", cfg.kx, "Wave number x");
  app.add_option("--ky", cfg.ky, "Wave number y (rashba)");
  app.add_option("--v0", cfg.v0, "Scalar potential strength (scalar_const, constant potential)");

  app.add_option("--potential", potential, "constant | cosine | gaussian | samples (scalar_grid)");
  app.add_option("--g", cfg.g, "Potential amplitude")->capture_default_str();
  app.add_option("--mode", cfg.mode, "Cosine wave number")->capture_default_str();
  app.add_option("--width", cfg.width, "Gaussian width")->capture_default_str();
  app.add_option("--samples", cfg.samples_path, "CSV file with header x,V");

  app.add_option("--grid-L", cfg.grid_half_length, "Grid half-length")->capture_default_str();
  app.add_option("--grid-n", cfg.grid_n, "Grid points")->capture_default_str();
  app.add_option("--bc", bc, "periodic | dirichlet");
  app.add_option("--scheme", scheme, "central2 | fourier");

  std::vector<std::string> methods;
  app.add_option("--method", methods, "spectral | paper | diagonal | spinor | all (repeatable)")
      ->check(CLI::IsMember({"spectral", "paper", "diagonal", "spinor", "all"}, CLI::ignore_case));
  app.add_flag("--normalize", cfg.normalize, "Normalize eigenvectors in the spectral metric");

  app.add_option("--sweep-param", cfg.sweep_param, "Parameter to sweep (lambda, v0, kx, g, ...)");
  app.add_option("--from", cfg.sweep_from, "Sweep start");
  app.add_option("--to", cfg.sweep_to, "Sweep end");
  app.add_option("--steps", cfg.sweep_steps, "Sweep points")->capture_default_str();

  std::vector<double> times;
  app.add_option("--t", times, "Evolution times (repeatable, default 0.1 1 10)");
  std::vector<int> ns;
  app.add_option("--ns", ns, "Grid sizes for converge (default 32 64 128)");

  app.add_option("--tol", cfg.tol, "Tolerance (default $PSEUDOSPEC_TOL or 1e-10)");
  app.add_option("--format", format, "json | csv");
  std::string out_path;
  app.add_option("--out", out_path, "Write the result here instead of stdout");
  app.add_flag("--timing", cfg.timing, "Record wall-clock runtime_ms (breaks byte-stability)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("UsageError", e.what(), 2);
  }

  using cli::Command;
  using cli::MetricMethod;
  using cli::Model;
  const auto cli_name = [](auto v) { return cli::to_string(v); };
  const auto lib_name = [](auto v) { return ps::to_string(v); };
  try {
    cfg.command = parse_enum(command,
                             {Command::spectrum, Command::metric, Command::verify, Command::reduce, Command::sweep,
                              Command::evolve, Command::converge},
                             cli_name, "command");
    cfg.model = parse_enum(model, {Model::rashba, Model::scalar_const, Model::scalar_grid}, cli_name, "--model");
    cfg.potential = parse_enum(potential,
                               {ps::PotentialFamily::constant, ps::PotentialFamily::cosine,
                                ps::PotentialFamily::gaussian, ps::PotentialFamily::samples},
                               lib_name, "--potential");
    cfg.bc = parse_enum(bc, {ps::Boundary::periodic, ps::Boundary::dirichlet}, lib_name, "--bc");
    cfg.scheme = parse_enum(scheme, {ps::Scheme::central2, ps::Scheme::fourier}, lib_name, "--scheme");
    cfg.format = parse_enum(format, {cli::OutputFormat::json, cli::OutputFormat::csv},
                            [](cli::OutputFormat f) { return f == cli::OutputFormat::json ? "json" : "csv"; },
                            "--format");
    for (const std::string& m : methods) {
      if (lowercase(m) == "all") {
        cfg.methods.clear();
        break;
      }
      cfg.methods.push_back(parse_enum(
          m, {MetricMethod::spectral, MetricMethod::paper, MetricMethod::diagonal, MetricMethod::spinor}, cli_name,
          "--method"));
    }
  } catch (const ps::Error& e) {
    return fail(e.name(), e.what(), 2);
  }
  if (!times.empty()) cfg.times = times;
  if (!ns.empty()) cfg.ns = ns;

  std::string text;
  try {
    text = cli::emit(cli::run(cfg), cfg.format);
  } catch (const ps::Error& e) {
    return fail(e.name(), e.what(), cli::exit_code_for(e.kind()));
  } catch (const std::exception& e) {
    return fail("InternalError", e.what(), 3);
  }

  if (out_path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) return fail("IoError", "cannot write " + out_path, 2);
  return 0;
}
