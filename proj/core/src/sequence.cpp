#include "ddopt/sequence.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include <boost/math/constants/constants.hpp>
#include <nlohmann/json.hpp>

#include "ddopt/precision.hpp"

namespace ddopt {

std::string to_string(SequenceErrorKind kind) {
  switch (kind) {
    case SequenceErrorKind::NonMonotonic:
      return "NonMonotonic";
    case SequenceErrorKind::OutOfRange:
      return "OutOfRange";
    case SequenceErrorKind::TooClose:
      return "TooClose";
  }
  return "Unknown";
}

namespace {

std::vector<double> validated_times(std::vector<double> deltas) {
  const std::size_t n = deltas.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double d = deltas[j];
    if (!std::isfinite(d) || d <= 0.0 || d >= 1.0) {
      throw SequenceError(SequenceErrorKind::OutOfRange, j,
                          "OutOfRange: delta[" + std::to_string(j) + "] = " + format_real(d) +
                              " is not inside (0, 1)");
    }
    if (j > 0 && d <= deltas[j - 1]) {
      throw SequenceError(SequenceErrorKind::NonMonotonic, j,
                          "NonMonotonic: delta[" + std::to_string(j) + "] = " + format_real(d) +
                              " does not exceed delta[" + std::to_string(j - 1) +
                              "] = " + format_real(deltas[j - 1]));
    }
  }
  std::vector<double> times;
  times.reserve(n + 2);
  times.push_back(0.0);
  times.insert(times.end(), deltas.begin(), deltas.end());
  times.push_back(1.0);
  for (std::size_t j = 0; j + 1 < times.size(); ++j) {
    if (times[j + 1] - times[j] < kMinSeparation) {
      const std::size_t index = j == n ? n - 1 : j;
      throw SequenceError(SequenceErrorKind::TooClose, index,
                          "TooClose: gap between times " + std::to_string(j) + " and " +
                              std::to_string(j + 1) + " is below " + format_real(kMinSeparation));
    }
  }
  return times;
}

}  // namespace

PulseSequence::PulseSequence() : times_{0.0, 1.0} {}

PulseSequence::PulseSequence(std::vector<double> deltas)
    : times_(validated_times(std::move(deltas))) {}

int PulseSequence::q(std::size_t j) const {
  if (j > n() + 1) throw std::out_of_range("pulse index out of range");
  return (j == 0 || j == n() + 1) ? 0 : 1;
}

int PulseSequence::weight(std::size_t j) const {
  if (j > n() + 1) throw std::out_of_range("pulse index out of range");
  return pulse_weight(j, n());
}

std::complex<double> PulseSequence::pairwise_delta(std::size_t i, std::size_t j) const {
  return {0.0, time(i) - time(j)};
}

int pulse_weight(std::size_t j, std::size_t n) {
  const int magnitude = (j == 0 || j == n + 1) ? 1 : 2;
  return (j % 2 == 0) ? magnitude : -magnitude;
}

PulseSequence make_sequence(std::vector<double> deltas) { return PulseSequence(std::move(deltas)); }

PulseSequence udd(int n) {
  if (n < 0) throw std::invalid_argument("pulse count must be nonnegative");
  std::vector<double> deltas(static_cast<std::size_t>(n));
  // Evaluated in extended precision so each δ_j is the correctly rounded
  // value (udd(2) is exactly (0.25, 0.75)).
  const Extended pi = boost::math::constants::pi<Extended>();
  for (int j = 1; j <= n; ++j) {
    const Extended s = sin(j * pi / (2 * (n + 1)));
    deltas[j - 1] = static_cast<double>(s * s);
  }
  return PulseSequence(std::move(deltas));
}

PulseSequence pdd(int n) {
  if (n < 0) throw std::invalid_argument("pulse count must be nonnegative");
  std::vector<double> deltas(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) deltas[j - 1] = static_cast<double>(j) / (n + 1);
  return PulseSequence(std::move(deltas));
}

PulseSequence reverse(const PulseSequence& seq) {
  const auto d = seq.deltas();
  std::vector<double> reflected(d.size());
  for (std::size_t j = 0; j < d.size(); ++j) reflected[j] = 1.0 - d[d.size() - 1 - j];
  return PulseSequence(std::move(reflected));
}

std::string format_real(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

std::string to_json(const PulseSequence& seq) {
  std::string out = "[";
  const auto d = seq.deltas();
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (j) out += ',';
    out += format_real(d[j]);
  }
  out += ']';
  return out;
}

PulseSequence sequence_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("malformed sequence JSON at byte " + std::to_string(e.byte) +
                                ": " + e.what());
  }
  if (!doc.is_array()) throw std::invalid_argument("sequence JSON must be an array of numbers");
  std::vector<double> deltas;
  deltas.reserve(doc.size());
  for (std::size_t j = 0; j < doc.size(); ++j) {
    if (!doc[j].is_number()) {
      throw std::invalid_argument("sequence JSON element " + std::to_string(j) +
                                  " is not a number");
    }
    deltas.push_back(doc[j].get<double>());
  }
  return PulseSequence(std::move(deltas));
}

std::string to_csv(const PulseSequence& seq) {
  std::string out = "j,delta_j\n";
  const auto d = seq.deltas();
  for (std::size_t j = 0; j < d.size(); ++j) {
    out += std::to_string(j + 1) + ',' + format_real(d[j]) + '\n';
  }
  return out;
}

PulseSequence sequence_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<double> deltas;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("j,", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("malformed sequence CSV at line " + std::to_string(line_no));
    }
    const std::string_view field(line.data() + comma + 1, line.size() - comma - 1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
      throw std::invalid_argument("malformed sequence CSV at line " + std::to_string(line_no));
    }
    deltas.push_back(value);
  }
  return PulseSequence(std::move(deltas));
}

std::ostream& operator<<(std::ostream& os, const PulseSequence& seq) { return os << to_json(seq); }

}  // namespace ddopt
