// Command-line front end: optimize, evaluate, fig1, fig2, udd, pdd.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "ddopt/errors.hpp"
#include "ddopt/experiment.hpp"
#include "ddopt/objective.hpp"
#include "ddopt/sequence.hpp"
#include "ddopt/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNotConverged = 2;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("ddopt");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* level = std::getenv("DDOPT_LOG");
  const std::string name = level ? level : "error";
  if (name == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else if (name == "info") {
    spdlog::set_level(spdlog::level::info);
  } else {
    spdlog::set_level(spdlog::level::err);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + out_path + "'");
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
  spdlog::info("wrote {}", out_path);
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) throw UsageError(std::string(name) + " must be positive");
}

ddopt::PulseSequence load_sequence(const std::optional<std::string>& inline_json,
                                   const std::optional<std::string>& file) {
  if (inline_json && file) throw UsageError("give either --deltas or --file, not both");
  if (inline_json) return ddopt::sequence_from_json(*inline_json);
  if (!file) throw UsageError("a sequence is required: --deltas or --file");
  const std::string text = read_file(*file);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') return ddopt::sequence_from_json(text);
  return ddopt::sequence_from_csv(text);
}

struct SolverFlags {
  double tol = ddopt::SolverConfig{}.residual_tol;
  int max_iters = ddopt::SolverConfig{}.max_iters;
  std::optional<int> steps;

  ddopt::SolverConfig config() const {
    ddopt::SolverConfig c;
    c.residual_tol = tol;
    c.max_iters = max_iters;
    c.continuation_steps = steps;
    c.validate();
    return c;
  }
};

void add_solver_flags(CLI::App* cmd, SolverFlags& flags) {
  cmd->add_option("--tol", flags.tol, "Residual max-norm tolerance");
  cmd->add_option("--max-iters", flags.max_iters, "Newton iterations per continuation step");
  cmd->add_option("--continuation-steps", flags.steps, "Number of continuation steps in z_c");
}

nlohmann::ordered_json report_json(const ddopt::ObjectiveReport& r) {
  return {{"method", ddopt::to_string(r.method)}, {"value", r.value}, {"error_estimate", r.error_estimate}};
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Optimal dynamical-decoupling sequences for an ohmic bath with a sharp cutoff"};
  app.require_subcommand(1);

  double omega_c = 1.0;
  double t = 1.0;
  int n = 0;
  std::string out_path;
  std::string format = "json";
  int jobs = 1;
  SolverFlags solver;

  auto* optimize = app.add_subcommand("optimize", "Solve for the HLODD sequence at z_c = omega_c * t");
  optimize->add_option("--n", n, "Number of pulses")->required();
  optimize->add_option("--omega-c", omega_c, "Cutoff frequency")->required();
  optimize->add_option("--t", t, "Total evolution time");
  optimize->add_option("--out", out_path, "Write JSON here instead of standard output");
  add_solver_flags(optimize, solver);

  std::optional<std::string> deltas_json;
  std::optional<std::string> seq_file;
  std::optional<std::string> spectrum_file;
  double s0 = 1.0;
  std::string method = "quadrature";
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate I_n (or chi for a tabulated spectrum)");
  evaluate->add_option("--deltas", deltas_json, "Pulse times as a JSON array");
  evaluate->add_option("--file", seq_file, "Pulse times as a JSON array or j,delta_j CSV file");
  evaluate->add_option("--omega-c", omega_c, "Cutoff frequency");
  evaluate->add_option("--t", t, "Total evolution time");
  evaluate->add_option("--method", method, "Evaluation method")
      ->check(CLI::IsMember({"quadrature", "series", "both"}));
  evaluate->add_option("--spectrum", spectrum_file, "omega,S CSV; evaluates chi by quadrature");
  evaluate->add_option("--s0", s0, "Spectral scale S0");
  evaluate->add_option("--out", out_path, "Write JSON here instead of standard output");

  std::vector<double> fig1_omegas{1.0, 5.0, 10.0};
  std::vector<int> fig1_ns{2, 5};
  std::string gnuplot_path;
  auto* fig1 = app.add_subcommand("fig1", "UDD vs HLODD pulse positions across cutoffs");
  fig1->add_option("--omega-c", fig1_omegas, "Cutoff frequencies")->delimiter(',');
  fig1->add_option("--n", fig1_ns, "Pulse counts")->delimiter(',');
  fig1->add_option("--jobs", jobs, "Concurrent solves")->check(CLI::PositiveNumber);
  fig1->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  fig1->add_option("--out", out_path, "Output path");
  fig1->add_option("--gnuplot", gnuplot_path, "Also write a gnuplot script for the CSV at --out");
  add_solver_flags(fig1, solver);

  double fig2_omega = 5.0;
  int n_max = 10;
  auto* fig2 = app.add_subcommand("fig2", "I_n of UDD and HLODD for n = 1..n_max");
  fig2->add_option("--omega-c", fig2_omega, "Cutoff frequency");
  fig2->add_option("--n-max", n_max, "Largest pulse count");
  fig2->add_option("--jobs", jobs, "Concurrent solves")->check(CLI::PositiveNumber);
  fig2->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  fig2->add_option("--out", out_path, "Output path");
  fig2->add_option("--gnuplot", gnuplot_path, "Also write a gnuplot script for the CSV at --out");
  add_solver_flags(fig2, solver);

  auto* udd_cmd = app.add_subcommand("udd", "Print the UDD sequence");
  auto* pdd_cmd = app.add_subcommand("pdd", "Print the PDD sequence");
  for (auto* cmd : {udd_cmd, pdd_cmd}) {
    cmd->add_option("--n", n, "Number of pulses")->required();
    cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", out_path, "Output path");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*optimize) {
      require_positive(omega_c, "omega_c");
      require_positive(t, "t");
      if (n < 1) throw UsageError("n must be at least 1");
      const ddopt::CutoffSpec cutoff(omega_c, t);
      const auto start = std::chrono::steady_clock::now();
      const auto result = ddopt::solve_hlodd(n, cutoff.z_c(), solver.config());
      spdlog::info("solved n={} z_c={} in {:.3f}s: {}", n, cutoff.z_c(),
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(),
                   result.diagnostics.message);
      emit(ddopt::result_to_json(result), out_path);
      if (!result.converged) spdlog::error("not converged: {}", result.diagnostics.message);
      return result.converged ? kExitOk : kExitNotConverged;
    }

    if (*evaluate) {
      require_positive(omega_c, "omega_c");
      require_positive(t, "t");
      const auto seq = load_sequence(deltas_json, seq_file);
      nlohmann::ordered_json j;
      j["n"] = seq.n();
      j["omega_c"] = omega_c;
      j["t"] = t;
      j["z_c"] = ddopt::CutoffSpec(omega_c, t).z_c();
      if (spectrum_file) {
        if (method != "quadrature") throw UsageError("tabulated spectra support --method quadrature only");
        const auto spectrum = ddopt::SpectrumModel::from_csv(read_file(*spectrum_file), s0);
        j["chi"] = report_json(ddopt::chi(seq, spectrum, t));
      } else {
        const double z_c = ddopt::CutoffSpec(omega_c, t).z_c();
        std::optional<ddopt::ObjectiveReport> quad;
        std::optional<ddopt::ObjectiveReport> series;
        if (method != "series") quad = ddopt::objective_quadrature(seq, z_c);
        if (method != "quadrature") series = ddopt::objective_series(seq, z_c);
        if (quad) j["quadrature"] = report_json(*quad);
        if (series) j["series"] = report_json(*series);
        if (quad && series) j["discrepancy"] = std::abs(quad->value - series->value);
      }
      emit(j.dump(2), out_path);
      return kExitOk;
    }

    if (*fig1 || *fig2) {
      if (!gnuplot_path.empty() && (out_path.empty() || format != "csv")) {
        throw UsageError("--gnuplot needs --format csv and --out");
      }
      std::string text;
      bool converged = true;
      if (*fig1) {
        for (double w : fig1_omegas) require_positive(w, "omega_c");
        ddopt::Fig1Options options;
        options.omega_c = fig1_omegas;
        options.n = fig1_ns;
        options.jobs = jobs;
        options.solver = solver.config();
        const auto result = ddopt::run_fig1(options);
        text = format == "csv" ? ddopt::fig1_csv(result.rows) : ddopt::records_to_json(result.records);
        converged = result.all_converged;
        if (!gnuplot_path.empty()) emit(ddopt::fig1_gnuplot(out_path), gnuplot_path);
      } else {
        require_positive(fig2_omega, "omega_c");
        ddopt::Fig2Options options;
        options.omega_c = fig2_omega;
        options.n_max = n_max;
        options.jobs = jobs;
        options.solver = solver.config();
        const auto result = ddopt::run_fig2(options);
        text = format == "csv" ? ddopt::fig2_csv(result.rows) : ddopt::records_to_json(result.records);
        converged = result.all_converged;
        if (!gnuplot_path.empty()) emit(ddopt::fig2_gnuplot(out_path), gnuplot_path);
      }
      emit(text, out_path);
      if (!converged) spdlog::error("some solves did not converge; rows are flagged");
      return converged ? kExitOk : kExitNotConverged;
    }

    if (*udd_cmd || *pdd_cmd) {
      if (n < 0) throw UsageError("n must be nonnegative");
      const auto seq = *udd_cmd ? ddopt::udd(n) : ddopt::pdd(n);
      emit(format == "csv" ? ddopt::to_csv(seq) : ddopt::to_json(seq), out_path);
      return kExitOk;
    }
  } catch (const ddopt::NumericalFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}
