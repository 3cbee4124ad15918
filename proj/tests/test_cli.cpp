#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "pseudospec/cli/runner.hpp"

using namespace pseudospec;
using namespace pseudospec::cli;

namespace {

RunConfig config(Command cmd, Model model) {
  RunConfig c;
  c.command = cmd;
  c.model = model;
  return c;
}

struct Process {
  std::string out;
  std::string err;
  int code = -1;
};

// Runs the executable through the shell; stderr goes to a temp file.
Process invoke(const std::string& args, const std::string& env = {}) {
  const auto err_path = std::filesystem::temp_directory_path() / "pseudospec_cli_stderr.txt";
  const std::string cmd = env + " " + PSEUDOSPEC_CLI_PATH + " " + args + " 2>" + err_path.string();
  Process p;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return p;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) p.out.append(buf.data(), n);
  const int status = pclose(pipe);
  p.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err_path);
  std::stringstream ss;
  ss << in.rdbuf();
  p.err = ss.str();
  return p;
}

}  // namespace

TEST(ExitCodes, Contract) {
  EXPECT_EQ(exit_code_for(ErrorKind::invalid_argument), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::odd_potential), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::asymmetric_grid), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::io_error), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::convergence_failure), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::exceptional_point), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::singular_denominator), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::complex_spectrum), 4);
  EXPECT_EQ(exit_code_for(ErrorKind::not_positive_definite), 4);
}

TEST(RunSpectrum, Examples) {
  RunConfig c = config(Command::spectrum, Model::rashba);
  c.lambda = 0.5;
  c.kx = 1.0;
  ResultRecord r = run_spectrum(c);
  ASSERT_EQ(r.eigenvalues.size(), 2u);
  EXPECT_NEAR(r.eigenvalues[1].real(), 1.3228756555, 1e-10);
  EXPECT_NEAR(r.eigenvalues[0].real(), -1.3228756555, 1e-10);
  EXPECT_EQ(r.classification, "all_real");
  EXPECT_TRUE(r.extras.contains("analytic_eigenvalues"));
  EXPECT_LE(r.extras.at("analytic_mismatch").get<double>(), 1e-14);

  c = config(Command::spectrum, Model::scalar_const);
  c.v0 = 2.0;
  r = run_spectrum(c);
  EXPECT_NEAR(std::abs(r.eigenvalues[0].imag()), 1.7320508076, 1e-10);
  EXPECT_NEAR(r.eigenvalues[0].real(), 0.0, 1e-14);
  EXPECT_EQ(r.classification, "conjugate_pairs");

  r = run_spectrum(config(Command::spectrum, Model::rashba));
  EXPECT_NEAR(r.eigenvalues[0].real(), -1.0, 1e-15);
  EXPECT_NEAR(r.eigenvalues[1].real(), 1.0, 1e-15);
}

TEST(RunSpectrum, GridModelHasNoClosedForm) {
  RunConfig c = config(Command::spectrum, Model::scalar_grid);
  c.grid_n = 16;
  const ResultRecord r = run_spectrum(c);
  EXPECT_EQ(r.eigenvalues.size(), 32u);
  EXPECT_FALSE(r.extras.contains("analytic_eigenvalues"));
}

TEST(RunSpectrum, InvalidParameters) {
  RunConfig c = config(Command::spectrum, Model::rashba);
  c.phys.c = -1.0;
  EXPECT_THROW(run_spectrum(c), InvalidArgument);
  c = config(Command::spectrum, Model::rashba);
  c.kx = std::nan("");
  EXPECT_THROW(run_spectrum(c), InvalidArgument);
  c = config(Command::spectrum, Model::scalar_grid);
  c.potential = PotentialFamily::samples;
  EXPECT_THROW(run_spectrum(c), InvalidArgument);
}

TEST(RunSweep, RecoversThresholds) {
  RunConfig c = config(Command::sweep, Model::rashba);
  c.kx = 1.0;
  c.sweep_param = "lambda";
  c.sweep_from = 0.0;
  c.sweep_to = 2.0;
  c.sweep_steps = 21;
  ResultRecord r = run_sweep(c);
  ASSERT_TRUE(r.threshold.has_value());
  EXPECT_NEAR(r.threshold->value, std::numbers::sqrt2, 1e-6 * std::numbers::sqrt2);
  EXPECT_EQ(r.threshold->direction, "real_to_complex");
  EXPECT_LE(r.threshold->bracket_low, std::numbers::sqrt2);
  EXPECT_GE(r.threshold->bracket_high, std::numbers::sqrt2);

  c.model = Model::scalar_const;
  c.sweep_param = "v0";
  c.sweep_to = 3.0;
  r = run_sweep(c);
  ASSERT_TRUE(r.threshold.has_value());
  EXPECT_NEAR(r.threshold->value, std::numbers::sqrt2, 1e-6 * std::numbers::sqrt2);

  // descending sweep sees the opposite transition
  c.sweep_from = 3.0;
  c.sweep_to = 0.0;
  r = run_sweep(c);
  ASSERT_TRUE(r.threshold.has_value());
  EXPECT_EQ(r.threshold->direction, "complex_to_real");
  EXPECT_NEAR(r.threshold->value, std::numbers::sqrt2, 1e-6 * std::numbers::sqrt2);
}

// Threshold against the closed-form radicand root for random parameters.
TEST(RunSweepProperty, AgreesWithRadicandRoot) {
  std::mt19937_64 rng(501);
  std::uniform_real_distribution<double> k(0.3, 2.5), m(0.5, 1.5);
  for (int trial = 0; trial < 8; ++trial) {
    RunConfig c = config(Command::sweep, Model::scalar_const);
    c.kx = k(rng);
    c.phys.m0 = m(rng);
    c.sweep_param = "v0";
    const double root = std::sqrt(c.kx * c.kx + c.phys.m0 * c.phys.m0);
    c.sweep_from = 0.0;
    c.sweep_to = 2.0 * root + 0.1;
    c.sweep_steps = 17;
    const ResultRecord r = run_sweep(c);
    ASSERT_TRUE(r.threshold.has_value());
    EXPECT_NEAR(r.threshold->value, root, 1e-6 * root);
  }
}

TEST(RunSweep, NoThresholdInRange) {
  RunConfig c = config(Command::sweep, Model::rashba);
  c.kx = 1.0;
  c.sweep_param = "lambda";
  c.sweep_to = 0.9;
  c.sweep_steps = 10;
  const ResultRecord r = run_sweep(c);
  EXPECT_FALSE(r.threshold.has_value());
  EXPECT_EQ(r.extras.at("threshold_status"), "no threshold in range");
  const auto& points = r.extras.at("points");
  ASSERT_EQ(points.size(), 10u);
  for (std::size_t i = 1; i < points.size(); ++i) {
    EXPECT_LT(points[i - 1].at("value").get<double>(), points[i].at("value").get<double>());
  }
  EXPECT_EQ(points.back().at("value").get<double>(), 0.9);
}

TEST(RunSweep, Errors) {
  RunConfig c = config(Command::sweep, Model::rashba);
  EXPECT_THROW(run_sweep(c), InvalidArgument);
  c.sweep_param = "nonsense";
  EXPECT_THROW(run_sweep(c), InvalidArgument);
  c.sweep_param = "lambda";
  c.sweep_steps = 1;
  EXPECT_THROW(run_sweep(c), InvalidArgument);
}

TEST(RunMetric, MethodsSideBySide) {
  RunConfig c = config(Command::metric, Model::rashba);
  c.lambda = 0.5;
  c.kx = 1.0;
  const ResultRecord r = run_metric(c);
  ASSERT_TRUE(r.metric_report.has_value());
  EXPECT_EQ(r.metric_report->verdict, Verdict::valid_metric);
  EXPECT_NEAR(r.metric_report->min_eig, 0.7629, 1e-4);
  const auto& reports = r.extras.at("metric_reports");
  ASSERT_EQ(reports.size(), 4u);
  EXPECT_EQ(reports[0].at("method"), "spectral");
  EXPECT_EQ(reports[1].at("method"), "paper");
  EXPECT_EQ(reports[2].at("method"), "diagonal");
  EXPECT_EQ(reports[2].at("report").at("verdict"), "valid_metric");
  EXPECT_LE(reports[2].at("report").at("relation_residual").get<double>(), 1e-14);
  EXPECT_EQ(reports[3].at("method"), "spinor");
  EXPECT_EQ(reports[3].at("report").at("verdict"), "valid_metric");
  EXPECT_TRUE(reports[0].contains("eta"));
}

TEST(RunMetric, RegimeAndApplicability) {
  RunConfig c = config(Command::metric, Model::scalar_const);
  c.v0 = 2.0;
  c.methods = {MetricMethod::spectral};
  EXPECT_THROW(run_metric(c), ComplexSpectrum);
  c.v0 = 0.5;
  c.methods = {MetricMethod::diagonal};
  EXPECT_THROW(run_metric(c), InvalidArgument);
  c = config(Command::metric, Model::rashba);
  c.methods = {MetricMethod::paper};
  EXPECT_THROW(run_metric(c), SingularDenominator);  // k = 0
  c.lambda = 1.0;
  c.kx = 0.5;
  c.methods = {MetricMethod::diagonal};
  EXPECT_THROW(run_metric(c), NotPositiveDefinite);
}

TEST(RunVerify, MomentumModels) {
  RunConfig c = config(Command::verify, Model::scalar_const);
  c.v0 = 0.5;
  c.kx = 1.0;
  ResultRecord r = run_verify(c);
  EXPECT_TRUE(r.extras.at("all_pass").get<bool>());
  c = config(Command::verify, Model::rashba);
  c.lambda = 0.5;
  c.kx = 1.0;
  c.ky = -0.3;
  r = run_verify(c);
  EXPECT_TRUE(r.extras.at("all_pass").get<bool>());
  for (const auto& check : r.extras.at("checks")) {
    if (check.at("name") == "parity_invariance") EXPECT_TRUE(check.at("pass").get<bool>());
    if (check.at("name") == "parity_reflected_k") {
      EXPECT_FALSE(check.at("pass").get<bool>());
      EXPECT_FALSE(check.at("required").get<bool>());
    }
  }
}

TEST(RunVerify, GridModel) {
  RunConfig c = config(Command::verify, Model::scalar_grid);
  c.potential = PotentialFamily::cosine;
  c.grid_n = 32;
  const ResultRecord r = run_verify(c);
  EXPECT_TRUE(r.extras.at("all_pass").get<bool>());
}

TEST(RunReduce, Examples) {
  RunConfig c = config(Command::reduce, Model::scalar_grid);
  c.v0 = 0.5;
  c.grid_n = 32;
  ResultRecord r = run_reduce(c);
  EXPECT_LE(r.extras.at("reduction_mismatch").get<double>(), 1e-10);

  c.potential = PotentialFamily::cosine;
  c.grid_n = 64;
  r = run_reduce(c);
  EXPECT_LE(r.extras.at("reduction_mismatch").get<double>(), 1e-8);
  EXPECT_TRUE(r.extras.contains("reduced_classification"));
  EXPECT_EQ(r.extras.at("reduced_eigenvalues").size(), 64u);
  EXPECT_EQ(r.extras.at("mapped_energies").size(), 128u);

  c.potential = PotentialFamily::constant;
  c.v0 = 0.0;
  r = run_reduce(c);
  EXPECT_EQ(r.classification, "all_real");
  EXPECT_THROW(run_reduce(config(Command::reduce, Model::rashba)), InvalidArgument);
}

TEST(RunEvolve, ResidualsAndBrokenRegime) {
  RunConfig c = config(Command::evolve, Model::rashba);
  c.lambda = 0.7;
  c.kx = 1.2;
  const ResultRecord r = run_evolve(c);
  const auto& rows = r.extras.at("evolution");
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& row : rows) EXPECT_LE(row.at("pseudo_unitarity_residual").get<double>(), 1e-8);
  c.lambda = 2.0;
  EXPECT_THROW(run_evolve(c), ComplexSpectrum);
}

TEST(RunConverge, Table) {
  RunConfig c = config(Command::converge, Model::scalar_grid);
  c.potential = PotentialFamily::cosine;
  c.scheme = Scheme::central2;
  c.ns = {32, 64, 128};
  const ResultRecord r = run_converge(c);
  const auto& rows = r.extras.at("convergence").at("rows");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_TRUE(rows[0].at("ratio").is_null());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_GE(rows[i].at("ratio").get<double>(), 3.2);
    EXPECT_LE(rows[i].at("ratio").get<double>(), 4.8);
  }
  c.bc = Boundary::dirichlet;
  EXPECT_THROW(run_converge(c), InvalidArgument);
}

TEST(Emit, JsonRoundTripsAtFullPrecision) {
  RunConfig c = config(Command::spectrum, Model::rashba);
  c.lambda = 0.3;
  c.kx = 0.123456789;
  c.ky = -2.5;
  const ResultRecord r = run(c);
  const std::string text = emit(r, OutputFormat::json);
  const Json parsed = Json::parse(text);
  EXPECT_EQ(parsed.at("schema_version"), "1");
  EXPECT_EQ(parsed.at("model"), "rashba");
  EXPECT_EQ(parsed.at("params").at("kx").get<double>(), 0.123456789);
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    EXPECT_EQ(parsed.at("eigenvalues")[i].at("re").get<double>(), r.eigenvalues[i].real());
    EXPECT_EQ(parsed.at("eigenvalues")[i].at("im").get<double>(), r.eigenvalues[i].imag());
  }
  EXPECT_EQ(text.back(), '\n');
  EXPECT_EQ(text.find('\r'), std::string::npos);
  // fixed key order
  std::vector<std::string> keys;
  for (const auto& [k, v] : parsed.items()) keys.push_back(k);
  EXPECT_EQ(keys.front(), "schema_version");
  EXPECT_EQ(keys.back(), "runtime_ms");
  EXPECT_EQ(parsed.at("runtime_ms"), 0);
}

TEST(Emit, CsvRowsMatchEigenvalues) {
  RunConfig c = config(Command::spectrum, Model::scalar_grid);
  c.grid_n = 16;
  const ResultRecord r = run(c);
  const std::string csv = emit(r, OutputFormat::csv);
  std::istringstream in(csv);
  std::string line;
  int rows = -1;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) continue;
    if (line == "index,re,im") {
      header = true;
      rows = 0;
      continue;
    }
    ++rows;
  }
  EXPECT_TRUE(header);
  EXPECT_EQ(rows, static_cast<int>(r.eigenvalues.size()));
}

TEST(Emit, SweepCsvLayout) {
  RunConfig c = config(Command::sweep, Model::rashba);
  c.kx = 1.0;
  c.sweep_param = "lambda";
  c.sweep_to = 2.0;
  c.sweep_steps = 5;
  const std::string csv = emit(run(c), OutputFormat::csv);
  EXPECT_NE(csv.find("value,index,re,im\n"), std::string::npos);
  EXPECT_NE(csv.find("# threshold.param=lambda\n"), std::string::npos);
}

TEST(Emit, NumberFormatting) {
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(std::nan("")), "null");
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Emit, DeterministicAcrossRuns) {
  RunConfig c = config(Command::sweep, Model::scalar_const);
  c.kx = 1.0;
  c.sweep_param = "v0";
  c.sweep_to = 3.0;
  c.sweep_steps = 33;
  for (OutputFormat f : {OutputFormat::json, OutputFormat::csv}) {
    EXPECT_EQ(emit(run(c), f), emit(run(c), f));
  }
}

TEST(Executable, SuccessAndOutFile) {
  const Process p = invoke("spectrum --model rashba --lambda 0.5 --kx 1 --ky 0");
  EXPECT_EQ(p.code, 0);
  const Json j = Json::parse(p.out);
  EXPECT_EQ(j.at("classification"), "all_real");
  EXPECT_NEAR(j.at("eigenvalues")[1].at("re").get<double>(), 1.3228756555, 1e-10);

  const auto out = std::filesystem::temp_directory_path() / "pseudospec_out.csv";
  const Process q = invoke("spectrum --model scalar_const --v0 2 --format csv --out " + out.string());
  EXPECT_EQ(q.code, 0);
  EXPECT_TRUE(q.out.empty());
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_NE(ss.str().find("# classification=conjugate_pairs"), std::string::npos);
  std::filesystem::remove(out);
}

TEST(Executable, ErrorRecordsAndExitCodes) {
  struct Case {
    std::string args;
    int code;
    std::string error;
  };
  const std::vector<Case> cases{
      {"spectrum --model nonsense", 2, "InvalidArgument"},
      {"spectrum", 2, "UsageError"},
      {"spectrum --model rashba --bogus 1", 2, "UsageError"},
      {"spectrum --model scalar_grid --bc dirichlet --grid-n 32", 2, "AsymmetricGrid"},
      {"spectrum --model scalar_grid --bc dirichlet --grid-n 33 --scheme fourier", 2, "SchemeBoundaryMismatch"},
      {"reduce --model scalar_grid --potential samples --samples /nonexistent.csv", 2, "IoError"},
      {"metric --model rashba --method paper", 3, "SingularDenominator"},
      {"metric --model scalar_const --v0 2 --method spectral", 4, "ComplexSpectrum"},
  };
  for (const Case& c : cases) {
    const Process p = invoke(c.args);
    EXPECT_EQ(p.code, c.code) << c.args;
    ASSERT_FALSE(p.err.empty()) << c.args;
    const Json e = Json::parse(p.err);
    EXPECT_EQ(e.at("error"), c.error) << c.args;
    EXPECT_EQ(e.at("exit_code"), c.code);
    EXPECT_TRUE(e.at("message").is_string());
    EXPECT_TRUE(p.out.empty());
  }
}

TEST(Executable, OddSampledPotential) {
  const auto path = std::filesystem::temp_directory_path() / "pseudospec_odd.csv";
  {
    std::ofstream f(path);
    f << "x,V\n";
    const int n = 16;
    for (int j = 0; j < n; ++j) {
      const double x = -std::numbers::pi + j * 2 * std::numbers::pi / n;
      char row[80];
      std::snprintf(row, sizeof row, "%.17g,%.17g\n", x, std::sin(x));
      f << row;
    }
  }
  const Process p = invoke("reduce --model scalar_grid --potential samples --grid-n 16 --samples " + path.string());
  EXPECT_EQ(p.code, 2);
  EXPECT_EQ(Json::parse(p.err).at("error"), "OddPotential");
  std::filesystem::remove(path);
}

TEST(Executable, ToleranceFromEnvironment) {
  const Process p = invoke("spectrum --model rashba", "PSEUDOSPEC_TOL=1e-6");
  EXPECT_EQ(p.code, 0);
  EXPECT_EQ(Json::parse(p.out).at("params").at("tol").get<double>(), 1e-6);
  const Process flag = invoke("spectrum --model rashba --tol 1e-9", "PSEUDOSPEC_TOL=1e-6");
  EXPECT_EQ(Json::parse(flag.out).at("params").at("tol").get<double>(), 1e-9);
  const Process bad = invoke("spectrum --model rashba", "PSEUDOSPEC_TOL=abc");
  EXPECT_EQ(bad.code, 2);
}

TEST(Executable, ByteIdenticalRepeats) {
  for (const char* args : {"metric --model scalar_const --v0 0.5 --kx 1 --method all",
                           "sweep --model rashba --kx 1 --sweep-param lambda --from 0 --to 2 --steps 25 --format csv"}) {
    const Process a = invoke(args);
    const Process b = invoke(args);
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
  }
}
