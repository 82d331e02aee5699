#include "ddopt/objective.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ddopt/filter.hpp"
#include "ddopt/kernels.hpp"
#include "ddopt/precision.hpp"

namespace ddopt {

CutoffSpec::CutoffSpec(double omega_c, double t) : omega_c_(omega_c), t_(t) {
  if (!std::isfinite(omega_c) || omega_c <= 0.0) {
    throw std::invalid_argument("omega_c must be positive");
  }
  if (!std::isfinite(t) || t <= 0.0) throw std::invalid_argument("t must be positive");
}

SpectrumModel::SpectrumModel(Kind kind, double s0, double omega_c,
                             std::vector<std::pair<double, double>> table)
    : kind_(kind), s0_(s0), omega_c_(omega_c), table_(std::move(table)) {}

SpectrumModel SpectrumModel::ohmic(double s0, double omega_c) {
  if (!std::isfinite(s0) || s0 <= 0.0) throw InvalidSpectrum("S0 must be positive");
  if (!std::isfinite(omega_c) || omega_c <= 0.0) {
    throw InvalidSpectrum("omega_c must be positive");
  }
  return SpectrumModel(Kind::OhmicSharpCutoff, s0, omega_c, {});
}

SpectrumModel SpectrumModel::tabulated(double s0, std::vector<std::pair<double, double>> table) {
  if (!std::isfinite(s0) || s0 <= 0.0) throw InvalidSpectrum("S0 must be positive");
  if (table.size() < 2) throw InvalidSpectrum("tabulated spectrum needs at least two rows");
  for (std::size_t k = 0; k < table.size(); ++k) {
    const auto [omega, s] = table[k];
    if (!std::isfinite(omega) || omega < 0.0) {
      throw InvalidSpectrum("row " + std::to_string(k) + ": omega must be finite and >= 0");
    }
    if (!std::isfinite(s) || s < 0.0) {
      throw InvalidSpectrum("row " + std::to_string(k) + ": negative spectral density");
    }
    if (k > 0 && omega <= table[k - 1].first) {
      throw InvalidSpectrum("row " + std::to_string(k) + ": omega must be strictly increasing");
    }
  }
  const double omega_max = table.back().first;
  return SpectrumModel(Kind::TabulatedPositive, s0, omega_max, std::move(table));
}

SpectrumModel SpectrumModel::from_csv(std::string_view text, double s0) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<std::pair<double, double>> table;
  std::size_t line_no = 0;
  auto parse = [](std::string_view field, double& out) {
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    return ec == std::errc{} && ptr == field.data() + field.size();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    double omega = 0.0;
    double s = 0.0;
    const bool ok = comma != std::string::npos &&
                    parse(std::string_view(line).substr(0, comma), omega) &&
                    parse(std::string_view(line).substr(comma + 1), s);
    if (!ok) {
      if (line_no == 1) continue;
      throw InvalidSpectrum("malformed spectrum CSV at line " + std::to_string(line_no));
    }
    table.emplace_back(omega, s);
  }
  return tabulated(s0, std::move(table));
}

double SpectrumModel::operator()(double omega) const {
  if (omega < 0.0) return 0.0;
  if (kind_ == Kind::OhmicSharpCutoff) return omega < omega_c_ ? s0_ * omega : 0.0;
  if (omega < table_.front().first || omega > table_.back().first) return 0.0;
  auto hi = std::upper_bound(table_.begin(), table_.end(), omega,
                             [](double w, const auto& row) { return w < row.first; });
  if (hi == table_.end()) return s0_ * table_.back().second;
  const auto lo = std::prev(hi);
  const double f = (omega - lo->first) / (hi->first - lo->first);
  return s0_ * (lo->second + f * (hi->second - lo->second));
}

std::string to_string(Method method) {
  return method == Method::Quadrature ? "quadrature" : "series";
}

namespace {

// |y(z)|² evaluated from the Taylor expansion y(z) = Σ_k M_k (iz)^k / k! for
// small z, with moments M_k = Σ_j w_j δ_j^k accumulated in extended
// precision. The direct sum loses everything below ~1e-16 · Σ|w_j| to
// cancellation, which is where I_n lives at small z_c.
class FilterPower {
 public:
  explicit FilterPower(const PulseSequence& seq) : seq_(seq) {
    const auto times = seq.times();
    std::vector<Extended> powers(times.size(), Extended(1));
    moments_.resize(kMoments);
    for (std::size_t k = 0; k < kMoments; ++k) {
      Extended m(0);
      for (std::size_t j = 0; j < times.size(); ++j) {
        m += seq.weight(j) * powers[j];
        powers[j] *= Extended(times[j]);
      }
      moments_[k] = static_cast<double>(m);
    }
    for (std::size_t j = 0; j < times.size(); ++j) weight_sum_ += std::abs(seq.weight(j));
  }

  double magnitude_squared(double z) const {
    if (z <= kTaylorLimit) {
      double re = 0.0;
      double im = 0.0;
      double scale = 1.0;
      // Σ|terms| bounds the rounding error; past Σ|w_j| the direct sum is
      // the more accurate of the two.
      double absolute = 0.0;
      for (std::size_t k = 0; k < kMoments && absolute <= weight_sum_; ++k) {
        const double term = moments_[k] * scale;
        absolute += std::abs(term);
        switch (k % 4) {
          case 0: re += term; break;
          case 1: im += term; break;
          case 2: re -= term; break;
          default: im -= term; break;
        }
        scale *= z / static_cast<double>(k + 1);
        if (k > z && weight_sum_ * scale <= 1e-18 * std::hypot(re, im)) return re * re + im * im;
        if (scale == 0.0) return re * re + im * im;
      }
    }
    return filter_value(seq_, z).magnitude_squared;
  }

 private:
  static constexpr std::size_t kMoments = 160;
  static constexpr double kTaylorLimit = 16.0;
  const PulseSequence& seq_;
  std::vector<double> moments_;
  double weight_sum_ = 0.0;
};

}  // namespace

double integrand(const PulseSequence& seq, double z) {
  if (std::isnan(z) || z < 0.0) throw DomainError("integrand requires z >= 0");
  if (z == 0.0) return 0.0;
  return FilterPower(seq).magnitude_squared(z) / z;
}

namespace {

double contract_tolerance(double value) { return std::max(1e-10, 1e-10 * std::abs(value)); }

QuadratureResult integrate_checked(const std::function<double(double)>& f, double a, double b,
                                   std::size_t panels) {
  QuadratureOptions options;
  options.initial_panels = panels;
  const QuadratureResult r = integrate_adaptive(f, a, b, options);
  if (!r.converged && r.error > contract_tolerance(r.value)) {
    throw NumericalFailure("quadrature did not converge within " +
                               std::to_string(options.max_intervals) + " intervals",
                           r.value, r.error);
  }
  return r;
}

// The integrand oscillates no faster than cos(z), so one panel per ~π keeps
// the initial rule in its asymptotic regime.
std::size_t panels_for(double length) {
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(length / 3.0)), 1, 256);
}

}  // namespace

ObjectiveReport objective_quadrature(const PulseSequence& seq, double z_c) {
  if (!std::isfinite(z_c) || z_c < 0.0) throw DomainError("z_c must be positive");
  ObjectiveReport report;
  report.method = Method::Quadrature;
  if (z_c == 0.0) return report;
  const FilterPower power(seq);
  const auto r = integrate_checked(
      [&](double z) { return z == 0.0 ? 0.0 : power.magnitude_squared(z) / z; }, 0.0, z_c,
      panels_for(z_c));
  report.value = std::max(r.value, 0.0);
  report.error_estimate = r.error;
  return report;
}

ObjectiveReport objective_series(const PulseSequence& seq, double z_c, const SeriesParams& params) {
  if (!std::isfinite(z_c) || z_c < 0.0) throw DomainError("z_c must be positive");
  params.validate();
  const auto sum = kernels::series_objective<double>(seq.times(), z_c, params);
  ObjectiveReport report;
  report.method = Method::Series;
  report.value = std::max(sum.value, 0.0);
  report.error_estimate = sum.error;
  return report;
}

std::vector<double> gradient(const PulseSequence& seq, double z_c) {
  if (!std::isfinite(z_c) || z_c < 0.0) throw DomainError("z_c must be positive");
  // Extended precision: components can be many orders below the O(z_c²)
  // pair terms that cancel in them.
  const std::vector<Extended> times(seq.times().begin(), seq.times().end());
  const auto g = kernels::gradient<Extended>(times, Extended(z_c));
  return std::vector<double>(g.values.begin(), g.values.end());
}

ObjectiveReport chi(const PulseSequence& seq, const SpectrumModel& spectrum, double t) {
  if (!std::isfinite(t) || t <= 0.0) throw DomainError("t must be positive");
  if (spectrum.kind() == SpectrumModel::Kind::OhmicSharpCutoff) {
    // ω = z / t maps S0 ω / ω² |y(ω t)|² dω onto S0 |y(z)|²/z dz.
    ObjectiveReport r = objective_quadrature(seq, spectrum.omega_c() * t);
    r.value *= spectrum.s0();
    r.error_estimate *= spectrum.s0();
    return r;
  }
  // |y(ω t)|² / ω² → t² (Σ_j w_j δ_j)² as ω → 0.
  double first_moment = 0.0;
  for (std::size_t j = 0; j < seq.times().size(); ++j) first_moment += seq.weight(j) * seq.time(j);
  const double at_zero = t * t * first_moment * first_moment;
  const FilterPower power(seq);
  auto f = [&](double omega) {
    if (omega == 0.0) return spectrum(0.0) * at_zero;
    return spectrum(omega) * power.magnitude_squared(omega * t) / (omega * omega);
  };
  ObjectiveReport report;
  report.method = Method::Quadrature;
  const auto& table = spectrum.table();
  for (std::size_t k = 0; k + 1 < table.size(); ++k) {
    const double a = table[k].first;
    const double b = table[k + 1].first;
    const auto r = integrate_checked(f, a, b, panels_for((b - a) * t));
    report.value += r.value;
    report.error_estimate += r.error;
  }
  report.value = std::max(report.value, 0.0);
  return report;
}

std::string report_to_json(const PulseSequence& seq, double z_c, const ObjectiveReport& report) {
  nlohmann::ordered_json j;
  j["n"] = seq.n();
  j["z_c"] = z_c;
  j["method"] = to_string(report.method);
  j["value"] = report.value;
  j["error_estimate"] = report.error_estimate;
  if (report.gradient) j["gradient"] = *report.gradient;
  return j.dump();
}

}  // namespace ddopt
