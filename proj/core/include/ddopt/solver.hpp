#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddopt/objective.hpp"
#include "ddopt/sequence.hpp"

namespace ddopt {

struct SolverConfig {
  /// Max-norm target on the stationarity residual.
  double residual_tol = 1e-10;
  /// Newton iterations per continuation step.
  int max_iters = 200;
  /// Initial Newton step length factor, in (0, 1].
  double damping = 1.0;
  /// First continuation z_c; defaults to min(1, z_c).
  std::optional<double> continuation_start;
  /// Number of continuation steps; defaults to ceil(z_c) capped at 64.
  std::optional<int> continuation_steps;
  /// Starting point at the first continuation step; defaults to udd(n).
  std::optional<PulseSequence> warm_start;
  /// Randomized restarts tried when the first solve does not end in a
  /// verified minimum.
  int restarts = 8;
  double restart_magnitude = 0.05;
  std::uint64_t seed = 20100915;
  /// How many times a failed continuation step may be halved.
  int max_refinements = 4;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct ContinuationSnapshot {
  double z_c = 0.0;
  PulseSequence sequence;
};

struct MinimumCheck {
  bool verified = false;
  std::string reason;
  double residual_norm = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double candidate_value = 0.0;
  /// I_n at 2n random feasible perturbations of size 1e-3.
  std::vector<double> perturbed_values;
  std::uint64_t seed = 0;
};

struct SolverDiagnostics {
  MinimumCheck minimum;
  /// Randomized restarts that were run (0 if the first solve verified).
  int restarts_used = 0;
  /// The iterate ended above I(udd(n)) and UDD was returned instead.
  bool fell_back_to_udd = false;
  /// Continuation steps that had to be split.
  int refinements = 0;
  std::string message;
};

struct OptimizationResult {
  PulseSequence sequence;
  /// I_n at `sequence`, evaluated by the quad-precision series.
  ObjectiveReport objective;
  double z_c = 0.0;
  double residual_norm = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<ContinuationSnapshot> path;
  bool minimum_verified = false;
  SolverDiagnostics diagnostics;
};

/// Left-hand side of the stationarity condition ∂I_n/∂δ_m = 0, m = 1..n.
/// Same implementation as `gradient`.
std::vector<double> stationarity_residual(const PulseSequence& seq, double z_c);

/// Strictly increasing z_c values ending exactly at `z_c_target`.
std::vector<double> continuation_schedule(double z_c_target, const SolverConfig& config);

struct VerifyOptions {
  double residual_tol = 1e-10;
  double fd_step = 1e-5;
  double perturbation = 1e-3;
  std::uint64_t seed = 20100915;
};

/// Second-order check of a stationary point: finite-difference Hessian of the
/// analytic gradient must have no eigenvalue below −1e-8·λ_max, and 2n random
/// feasible perturbations must not lower I_n by more than 1e-12. Points whose
/// residual exceeds the tolerance are rejected without further work.
MinimumCheck verify_minimum(const PulseSequence& seq, double z_c, const VerifyOptions& options = {});

/// Solves the stationarity system for n pulses at z_c by damped Newton with
/// continuation in z_c from a UDD warm start. Never returns a sequence with a
/// larger objective than udd(n).
OptimizationResult solve_hlodd(int n, double z_c, const SolverConfig& config = {});

/// Random feasible displacement of `seq` with Euclidean size `magnitude`.
PulseSequence perturb(const PulseSequence& seq, double magnitude, std::uint64_t seed);

/// {n, z_c, deltas, I_value, residual_norm, converged, minimum_verified,
///  iterations, continuation_path}
std::string result_to_json(const OptimizationResult& result);

}  // namespace ddopt
