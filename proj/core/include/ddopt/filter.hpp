#pragma once

#include <complex>
#include <cstdint>

#include "ddopt/sequence.hpp"

namespace ddopt {

/// y_n(z) at dimensionless frequency z = ω t.
struct FilterValue {
  double z = 0.0;
  std::complex<double> value;
  double magnitude_squared = 0.0;
};

/// Direct O(n) evaluation y_n(z) = Σ_{j=0}^{n+1} 2^{q_j} (-1)^j exp(i z δ_j).
FilterValue filter_value(const PulseSequence& seq, double z);

/// |y_n(z)|² from the O(n²) double sum Σ_{i,j} 2^{q_i+q_j} (-1)^{i+j} exp(z Δ_ij).
/// Independent of filter_value; the two are cross-checks of each other.
double magnitude_squared_sumform(const PulseSequence& seq, double z);

/// Σ_{i,j=0}^{n+1} 2^{q_i+q_j} (-1)^{i+j} in exact integer arithmetic. Zero for
/// every n, which is the statement y_n(0) = 0.
std::int64_t dc_identity_check(int n);

}  // namespace ddopt
