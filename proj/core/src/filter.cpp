#include "ddopt/filter.hpp"

#include <cmath>
#include <stdexcept>

namespace ddopt {

FilterValue filter_value(const PulseSequence& seq, double z) {
  const auto t = seq.times();
  double re = 0.0;
  double im = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double w = seq.weight(j);
    const double phase = z * t[j];
    re += w * std::cos(phase);
    im += w * std::sin(phase);
  }
  return {z, {re, im}, re * re + im * im};
}

double magnitude_squared_sumform(const PulseSequence& seq, double z) {
  const std::size_t m = seq.n() + 2;
  std::complex<double> sum{0.0, 0.0};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double coeff = static_cast<double>(seq.weight(i) * seq.weight(j));
      sum += coeff * std::exp(z * seq.pairwise_delta(i, j));
    }
  }
  return sum.real();
}

std::int64_t dc_identity_check(int n) {
  if (n < 0) throw std::invalid_argument("pulse count must be nonnegative");
  const auto count = static_cast<std::size_t>(n);
  std::int64_t sum = 0;
  for (std::size_t i = 0; i <= count + 1; ++i) {
    for (std::size_t j = 0; j <= count + 1; ++j) {
      sum += static_cast<std::int64_t>(pulse_weight(i, count)) * pulse_weight(j, count);
    }
  }
  return sum;
}

}  // namespace ddopt
