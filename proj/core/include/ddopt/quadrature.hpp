#pragma once

#include <cstddef>
#include <functional>

namespace ddopt {

struct QuadratureOptions {
  double abs_tol = 0.0;
  double rel_tol = 1e-13;
  std::size_t max_intervals = 10000;
  /// Uniform panels to start from before adaptive bisection.
  std::size_t initial_panels = 1;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
  bool converged = false;
};

/// Globally adaptive 21-point Gauss–Kronrod integration of f over [a, b].
/// The interval with the largest |K21 − G10| estimate is bisected until the
/// summed estimate meets max(abs_tol, rel_tol·|value|), every remaining
/// interval is at its rounding floor, or the interval budget is spent
/// (converged = false). Endpoints are never sampled.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& options = {});

}  // namespace ddopt
