#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ddopt/errors.hpp"

namespace ddopt {

/// Smallest allowed gap between adjacent pulse times (including the
/// boundaries 0 and 1).
inline constexpr double kMinSeparation = 1e-9;

/// Ordered fractional π-pulse times δ_1 < … < δ_n in (0, 1).
///
/// The boundary times δ_0 = 0 and δ_{n+1} = 1 are reachable through `time(j)`
/// for j = 0..n+1, so sums over the full index range can be written directly.
/// Instances are immutable.
class PulseSequence {
 public:
  /// Empty sequence (free evolution, n = 0).
  PulseSequence();

  /// Validates and wraps `deltas`. Throws SequenceError; never reorders.
  explicit PulseSequence(std::vector<double> deltas);

  std::size_t n() const noexcept { return times_.size() - 2; }
  bool empty() const noexcept { return n() == 0; }

  /// Interior times δ_1..δ_n.
  std::span<const double> deltas() const noexcept { return {times_.data() + 1, n()}; }

  /// All n + 2 times including both boundaries.
  std::span<const double> times() const noexcept { return times_; }

  /// δ_j for j in 0..n+1.
  double time(std::size_t j) const { return times_.at(j); }

  /// q_j: 0 at the boundaries, 1 for interior pulses.
  int q(std::size_t j) const;

  /// Signed weight 2^{q_j} (-1)^j of the j-th term of the filter function.
  int weight(std::size_t j) const;

  /// Δ_ij = i (δ_i − δ_j).
  std::complex<double> pairwise_delta(std::size_t i, std::size_t j) const;

  friend bool operator==(const PulseSequence& a, const PulseSequence& b) = default;

 private:
  std::vector<double> times_;
};

/// Weight 2^{q_j} (-1)^j for index j of an n-pulse sequence.
int pulse_weight(std::size_t j, std::size_t n);

PulseSequence make_sequence(std::vector<double> deltas);

/// Uhrig sequence δ_j = sin²(jπ / (2(n+1))). n = 0 gives the empty sequence.
PulseSequence udd(int n);

/// Periodic sequence δ_j = j / (n+1). n = 0 gives the empty sequence.
PulseSequence pdd(int n);

/// Time reflection δ'_j = 1 − δ_{n+1−j}.
PulseSequence reverse(const PulseSequence& seq);

/// JSON array of fractional times, e.g. `[0.25,0.75]`.
std::string to_json(const PulseSequence& seq);

/// Parses a JSON array and validates it. Malformed JSON throws
/// std::invalid_argument whose message includes the byte offset.
PulseSequence sequence_from_json(std::string_view text);

/// CSV with header `j,delta_j`, one row per interior pulse.
std::string to_csv(const PulseSequence& seq);
PulseSequence sequence_from_csv(std::string_view text);

/// `x` with 17 significant digits ('.' separator).
std::string format_real(double x);

std::ostream& operator<<(std::ostream& os, const PulseSequence& seq);

}  // namespace ddopt
