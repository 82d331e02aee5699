#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ddopt/quadrature.hpp"
#include "ddopt/sequence.hpp"
#include "ddopt/special_functions.hpp"

namespace ddopt {

/// Physical cutoff ω_c and total time t; only their product z_c enters.
class CutoffSpec {
 public:
  /// Throws std::invalid_argument unless both are finite and positive.
  CutoffSpec(double omega_c, double t);

  double omega_c() const noexcept { return omega_c_; }
  double t() const noexcept { return t_; }
  double z_c() const noexcept { return omega_c_ * t_; }

 private:
  double omega_c_;
  double t_;
};

/// Noise spectral density S(ω).
class SpectrumModel {
 public:
  enum class Kind { OhmicSharpCutoff, TabulatedPositive };

  /// S(ω) = S0 ω Θ(ω_c − ω).
  static SpectrumModel ohmic(double s0, double omega_c);

  /// S(ω) = S0 × piecewise-linear interpolation of (ω, S) samples, zero
  /// outside the sampled support. Throws InvalidSpectrum for negative
  /// samples, unsorted ω, or fewer than two rows.
  static SpectrumModel tabulated(double s0, std::vector<std::pair<double, double>> table);

  /// Two-column CSV `omega,S` (a non-numeric first line is taken as a header).
  static SpectrumModel from_csv(std::string_view text, double s0 = 1.0);

  Kind kind() const noexcept { return kind_; }
  double s0() const noexcept { return s0_; }
  double omega_c() const noexcept { return omega_c_; }
  const std::vector<std::pair<double, double>>& table() const noexcept { return table_; }

  double operator()(double omega) const;

 private:
  SpectrumModel(Kind kind, double s0, double omega_c, std::vector<std::pair<double, double>> table);

  Kind kind_;
  double s0_;
  double omega_c_;
  std::vector<std::pair<double, double>> table_;
};

enum class Method { Quadrature, Series };

std::string to_string(Method method);

struct ObjectiveReport {
  double value = 0.0;
  std::optional<std::vector<double>> gradient;
  Method method = Method::Quadrature;
  double error_estimate = 0.0;
};

/// |y_n(z)|² / z, with the removable singularity at z = 0 set to 0.
/// Throws DomainError for z < 0.
double integrand(const PulseSequence& seq, double z);

/// I_n = ∫_0^{z_c} |y_n(z)|²/z dz by adaptive quadrature. The reported
/// error_estimate is below max(1e-10, 1e-10·value); otherwise throws
/// NumericalFailure with the best estimate.
ObjectiveReport objective_quadrature(const PulseSequence& seq, double z_c);

/// I_n from the pairwise series −2 Σ_{i<j} w_i w_j Cin((δ_j − δ_i) z_c).
ObjectiveReport objective_series(const PulseSequence& seq, double z_c,
                                 const SeriesParams& params = {});

/// ∂I_n/∂δ_m for m = 1..n (closed form; no quadrature).
std::vector<double> gradient(const PulseSequence& seq, double z_c);

/// χ(t) = ∫_0^∞ S(ω)/ω² |y_n(ω t)|² dω.
ObjectiveReport chi(const PulseSequence& seq, const SpectrumModel& spectrum, double t);

/// Result record {n, z_c, method, value, error_estimate}.
std::string report_to_json(const PulseSequence& seq, double z_c, const ObjectiveReport& report);

}  // namespace ddopt
