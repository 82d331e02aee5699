#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/constants/constants.hpp>

#include "ddopt/errors.hpp"

namespace ddopt {

/// Truncation controls for the resummed objective series.
struct SeriesParams {
  static constexpr double euler_gamma = 0.5772156649015329;

  /// Highest power x^k kept in the Cin power series (k even).
  int k_max = 64;
  /// Above this |x|, Cin(x) = γ + ln|x| − Ci(x) with Ci from a continued fraction.
  double large_arg_switch = 8.0;
  /// Series stops once a term falls below this fraction of the partial sum.
  double relative_term_tol = 1e-16;

  void validate() const;

  /// Settings for quad-precision evaluation.
  static SeriesParams extended() { return {128, 16.0, 1e-34}; }
};

inline void SeriesParams::validate() const {
  if (k_max < 8) throw std::invalid_argument("SeriesParams.k_max must be at least 8");
  if (!(large_arg_switch > 0.0)) {
    throw std::invalid_argument("SeriesParams.large_arg_switch must be positive");
  }
  if (!(relative_term_tol > 0.0)) {
    throw std::invalid_argument("SeriesParams.relative_term_tol must be positive");
  }
}

template <class Real>
struct SeriesValue {
  Real value;
  /// Bound on the neglected tail plus accumulated rounding.
  Real error;
};

namespace detail {

template <class Real>
Real to_real(double x) {
  return static_cast<Real>(x);
}

/// Cin(x) = Σ_{m≥1} (-1)^{m+1} x^{2m} / ((2m)(2m)!).
template <class Real>
SeriesValue<Real> cin_power_series(Real x, const SeriesParams& params) {
  using std::abs;
  const Real x2 = x * x;
  const Real tol = to_real<Real>(params.relative_term_tol);
  Real power = x2 / 2;  // x^{2m} / (2m)!
  Real sum = 0;
  Real largest = 0;
  for (int m = 1; 2 * m <= params.k_max; ++m) {
    const Real term = power / (2 * m);
    sum += (m % 2 == 1) ? term : -term;
    if (term > largest) largest = term;
    if (term <= tol * abs(sum)) {
      return {sum, term + largest * std::numeric_limits<Real>::epsilon()};
    }
    power *= x2 / Real((2 * m + 1) * (2 * m + 2));
  }
  throw NumericalFailure("Cin power series not converged at k_max = " +
                             std::to_string(params.k_max),
                         static_cast<double>(sum), static_cast<double>(power));
}

/// Ci(x) for x > 0 from the continued fraction of E1(ix) (modified Lentz).
template <class Real>
SeriesValue<Real> ci_continued_fraction(Real x) {
  using std::abs;
  using std::cos;
  using std::sin;
  struct Cplx {
    Real re, im;
  };
  auto mul = [](Cplx a, Cplx b) { return Cplx{a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; };
  auto inv = [](Cplx a) {
    const Real den = a.re * a.re + a.im * a.im;
    return Cplx{a.re / den, -a.im / den};
  };
  const Real eps = std::numeric_limits<Real>::epsilon();
  const Real tiny = std::numeric_limits<Real>::min() / eps;

  Cplx b{1, x};
  Cplx c{1 / tiny, 0};
  Cplx d = inv(b);
  Cplx h = d;
  constexpr int kMaxIter = 100000;
  for (int i = 2; i <= kMaxIter; ++i) {
    const Real a = -Real(i - 1) * Real(i - 1);
    b.re += 2;
    d = inv(Cplx{a * d.re + b.re, a * d.im + b.im});
    const Cplx ac = mul(Cplx{a, 0}, inv(c));
    c = Cplx{b.re + ac.re, b.im + ac.im};
    const Cplx del = mul(c, d);
    h = mul(h, del);
    if (abs(del.re - 1) + abs(del.im) <= eps) {
      h = mul(Cplx{cos(x), -sin(x)}, h);
      return {-h.re, 4 * eps * (abs(h.re) + abs(h.im))};
    }
  }
  throw NumericalFailure("Ci continued fraction not converged", static_cast<double>(-h.re), 1.0);
}

}  // namespace detail

/// Entire cosine integral Cin(x) = ∫_0^x (1 − cos s)/s ds (even in x).
template <class Real>
SeriesValue<Real> cin(Real x, const SeriesParams& params = {}) {
  using std::abs;
  using std::log;
  x = abs(x);
  if (x == 0) return {Real(0), Real(0)};
  if (x <= detail::to_real<Real>(params.large_arg_switch)) {
    return detail::cin_power_series(x, params);
  }
  const auto ci = detail::ci_continued_fraction(x);
  const Real value = boost::math::constants::euler<Real>() + log(x) - ci.value;
  return {value, ci.error + 4 * std::numeric_limits<Real>::epsilon() * abs(value)};
}

/// Cosine integral Ci(x) = −∫_x^∞ cos(s)/s ds, x > 0.
template <class Real>
Real ci(Real x, const SeriesParams& params = {}) {
  using std::log;
  if (!(x > 0)) throw DomainError("Ci(x) requires x > 0");
  if (x > detail::to_real<Real>(params.large_arg_switch)) {
    return detail::ci_continued_fraction(x).value;
  }
  return boost::math::constants::euler<Real>() + log(x) - detail::cin_power_series(x, params).value;
}

}  // namespace ddopt
