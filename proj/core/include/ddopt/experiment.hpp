#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ddopt/solver.hpp"

namespace ddopt {

enum class SequenceMethod { UDD, PDD, HLODD };

std::string to_string(SequenceMethod method);
SequenceMethod sequence_method_from_string(std::string_view name);

/// One evaluated sequence in a sweep.
struct ExperimentRecord {
  std::string experiment_id;
  int n = 0;
  double omega_c = 0.0;
  double t = 1.0;
  SequenceMethod method = SequenceMethod::UDD;
  std::vector<double> deltas;
  double I_value = 0.0;
  std::optional<double> residual_norm;
  /// Solver outcome for HLODD records.
  std::optional<bool> converged;
  std::string timestamp;

  friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

std::string record_to_json(const ExperimentRecord& record);
/// Throws std::invalid_argument on schema violations.
ExperimentRecord record_from_json(std::string_view text);
std::string records_to_json(const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> records_from_json(std::string_view text);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string iso8601_now();

struct Fig1Options {
  std::vector<double> omega_c{1.0, 5.0, 10.0};
  std::vector<int> n{2, 5};
  int jobs = 1;
  SolverConfig solver;
  std::string timestamp;
};

struct Fig1Row {
  double omega_c = 0.0;
  int n = 0;
  int j = 0;
  double delta_udd = 0.0;
  double delta_hlodd = 0.0;
  double abs_deviation = 0.0;
  bool converged = true;

  friend bool operator==(const Fig1Row&, const Fig1Row&) = default;
};

struct Fig1Result {
  std::vector<Fig1Row> rows;
  /// UDD and HLODD record per (omega_c, n), sorted by (omega_c, n, method).
  std::vector<ExperimentRecord> records;
  bool all_converged = true;
};

/// UDD vs HLODD pulse positions at t = 1 for every (omega_c, n) cell.
Fig1Result run_fig1(const Fig1Options& options);

struct Fig2Options {
  double omega_c = 5.0;
  int n_max = 10;
  int jobs = 1;
  SolverConfig solver;
  std::string timestamp;
};

struct Fig2Row {
  int n = 0;
  double I_udd = 0.0;
  double I_hlodd = 0.0;
  /// I_udd / I_hlodd.
  double ratio = 0.0;
  bool converged = true;

  friend bool operator==(const Fig2Row&, const Fig2Row&) = default;
};

struct Fig2Result {
  std::vector<Fig2Row> rows;
  std::vector<ExperimentRecord> records;
  bool all_converged = true;
};

/// Quadrature I_n of UDD and HLODD for n = 1..n_max at t = 1.
Fig2Result run_fig2(const Fig2Options& options);

std::string fig1_csv(const std::vector<Fig1Row>& rows);
std::vector<Fig1Row> fig1_rows_from_csv(std::string_view text);
std::vector<Fig1Row> fig1_rows_from_records(const std::vector<ExperimentRecord>& records);

std::string fig2_csv(const std::vector<Fig2Row>& rows);
std::vector<Fig2Row> fig2_rows_from_csv(std::string_view text);
std::vector<Fig2Row> fig2_rows_from_records(const std::vector<ExperimentRecord>& records);

/// gnuplot scripts that plot the CSV at `csv_path`.
std::string fig1_gnuplot(const std::string& csv_path);
std::string fig2_gnuplot(const std::string& csv_path);

}  // namespace ddopt
