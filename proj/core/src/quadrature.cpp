#include "ddopt/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ddopt {
namespace {

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool at_floor;
};

struct LargerError {
  bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

Panel gauss_kronrod_21(const std::function<double(double)>& f, double a, double b) {
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
  using Gauss = boost::math::quadrature::gauss<double, 10>;
  const auto& x = Kronrod::abscissa();   // 0, then increasing positive nodes
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();     // Gauss nodes are x[1], x[3], ...

  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kronrod = wk[0] * f(center);
  double gauss = 0.0;
  double absolute = std::abs(kronrod);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double fl = f(center - half * x[i]);
    const double fr = f(center + half * x[i]);
    kronrod += wk[i] * (fl + fr);
    absolute += wk[i] * (std::abs(fl) + std::abs(fr));
    if (i % 2 == 1) gauss += wg[(i - 1) / 2] * (fl + fr);
  }
  kronrod *= half;
  gauss *= half;
  absolute *= std::abs(half);
  const double error = std::abs(kronrod - gauss);
  const double floor = 50.0 * std::numeric_limits<double>::epsilon() * absolute;
  return {a, b, kronrod, std::max(error, floor), error <= floor};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& options) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("integration limits must be finite");
  }
  if (options.initial_panels == 0 || options.max_intervals < options.initial_panels) {
    throw std::invalid_argument("invalid quadrature panel budget");
  }
  if (a == b) return {0.0, 0.0, 0, true};

  std::priority_queue<Panel, std::vector<Panel>, LargerError> active;
  std::vector<Panel> settled;
  double value = 0.0;
  double error = 0.0;
  const std::size_t panels = options.initial_panels;
  for (std::size_t k = 0; k < panels; ++k) {
    const double lo = a + (b - a) * static_cast<double>(k) / static_cast<double>(panels);
    const double hi = k + 1 == panels ? b : a + (b - a) * static_cast<double>(k + 1) / static_cast<double>(panels);
    Panel p = gauss_kronrod_21(f, lo, hi);
    value += p.value;
    error += p.error;
    if (p.at_floor) {
      settled.push_back(p);
    } else {
      active.push(p);
    }
  }

  auto target = [&] { return std::max(options.abs_tol, options.rel_tol * std::abs(value)); };
  std::size_t intervals = panels;
  while (!active.empty() && error > target()) {
    if (intervals >= options.max_intervals) {
      return {value, error, intervals, false};
    }
    const Panel worst = active.top();
    active.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Interval cannot be split further in double.
      settled.push_back(worst);
      continue;
    }
    const Panel left = gauss_kronrod_21(f, worst.a, mid);
    const Panel right = gauss_kronrod_21(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    for (const Panel& p : {left, right}) {
      if (p.at_floor) {
        settled.push_back(p);
      } else {
        active.push(p);
      }
    }
    ++intervals;
  }

  // Re-sum from the panels to shed drift from the running updates.
  double total = 0.0;
  double total_error = 0.0;
  for (const Panel& p : settled) {
    total += p.value;
    total_error += p.error;
  }
  while (!active.empty()) {
    total += active.top().value;
    total_error += active.top().error;
    active.pop();
  }
  return {total, total_error, intervals, true};
}

}  // namespace ddopt
