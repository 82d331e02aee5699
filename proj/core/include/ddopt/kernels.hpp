#pragma once

// Pairwise sums over the boundary-augmented pulse times t_0 = 0 < t_1 < … <
// t_{n+1} = 1. Every quantity here is a sum over pairs (i, j) of the signed
// weights w_i w_j (w_j = 2^{q_j} (-1)^j) times a function of the separation
// (t_i − t_j) z_c. Templated on the scalar so the solver can run in quad
// precision while the public API stays in double.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ddopt/special_functions.hpp"

namespace ddopt::kernels {

inline int weight(std::size_t j, std::size_t count) {
  const int magnitude = (j == 0 || j + 1 == count) ? 1 : 2;
  return (j % 2 == 0) ? magnitude : -magnitude;
}

/// (cos(d z_c) − 1) / d, written as −2 sin²(d z_c / 2) / d.
template <class Real>
Real pair_slope(Real d, Real zc) {
  using std::sin;
  const Real s = sin(d * zc / 2);
  return -2 * s * s / d;
}

/// d/dd of pair_slope: z_c² (2 sin²(u/2) − u sin u) / u² with u = d z_c.
template <class Real>
Real pair_curvature(Real d, Real zc) {
  using std::abs;
  using std::sin;
  const Real u = d * zc;
  if (abs(u) < Real(0.5)) {
    // Σ_{k≥1} (-1)^{k+1} (1 − 2k) u^{2k−2} / (2k)!
    const Real u2 = u * u;
    Real factorial_term = Real(1) / 2;  // u^{2k-2} / (2k)!
    Real sum = 0;
    for (int k = 1; k < 40; ++k) {
      const Real term = factorial_term * (1 - 2 * k);
      sum += (k % 2 == 1) ? term : -term;
      if (abs(term) <= std::numeric_limits<Real>::epsilon() * abs(sum) / 4) break;
      factorial_term *= u2 / Real((2 * k + 1) * (2 * k + 2));
    }
    return zc * zc * sum;
  }
  const Real s = sin(u / 2);
  return zc * zc * (2 * s * s - u * sin(u)) / (u * u);
}

template <class Real>
struct SeriesSum {
  Real value;
  /// Σ |pair contributions|, the scale against which cancellation is measured.
  Real magnitude;
  Real error;
};

/// I_n = −2 Σ_{i<j} w_i w_j Cin((t_j − t_i) z_c).
template <class Real>
SeriesSum<Real> series_objective(std::span<const Real> times, Real zc,
                                 const SeriesParams& params) {
  using std::abs;
  const std::size_t count = times.size();
  Real value = 0;
  Real magnitude = 0;
  Real error = 0;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      const auto c = cin((times[j] - times[i]) * zc, params);
      const Real coeff = Real(-2 * weight(i, count) * weight(j, count));
      value += coeff * c.value;
      magnitude += abs(coeff * c.value);
      error += abs(coeff) * c.error;
    }
  }
  error += 2 * std::numeric_limits<Real>::epsilon() * magnitude;
  return {value, magnitude, error};
}

template <class Real>
struct GradientEval {
  std::vector<Real> values;
  /// max_m Σ_i |term_{m,i}|; rounding noise in `values` is a few ulps of this.
  Real magnitude;
};

/// ∂I_n/∂t_m = Σ_{i≠m} 2 w_m w_i (cos((t_m − t_i) z_c) − 1)/(t_m − t_i), m = 1..n.
template <class Real>
GradientEval<Real> gradient(std::span<const Real> times, Real zc) {
  using std::abs;
  const std::size_t count = times.size();
  const std::size_t n = count - 2;
  GradientEval<Real> out{std::vector<Real>(n, Real(0)), Real(0)};
  for (std::size_t m = 1; m <= n; ++m) {
    Real sum = 0;
    Real magnitude = 0;
    for (std::size_t i = 0; i < count; ++i) {
      if (i == m) continue;
      const Real term = Real(2 * weight(m, count) * weight(i, count)) *
                        pair_slope(times[m] - times[i], zc);
      sum += term;
      magnitude += abs(term);
    }
    out.values[m - 1] = sum;
    if (magnitude > out.magnitude) out.magnitude = magnitude;
  }
  return out;
}

template <class Real>
using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

/// Analytic Hessian of I_n (the Jacobian of the stationarity residual).
template <class Real>
Matrix<Real> hessian(std::span<const Real> times, Real zc) {
  const std::size_t count = times.size();
  const std::size_t n = count - 2;
  Matrix<Real> h = Matrix<Real>::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t m = 1; m <= n; ++m) {
    const auto row = static_cast<Eigen::Index>(m - 1);
    for (std::size_t i = 0; i < count; ++i) {
      if (i == m) continue;
      const Real c = Real(2 * weight(m, count) * weight(i, count)) *
                     pair_curvature(times[m] - times[i], zc);
      h(row, row) += c;
      if (i >= 1 && i <= n) h(row, static_cast<Eigen::Index>(i - 1)) -= c;
    }
  }
  return h;
}

}  // namespace ddopt::kernels
