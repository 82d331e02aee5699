#include "ddopt/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <nlohmann/json.hpp>

#include "ddopt/kernels.hpp"
#include "ddopt/precision.hpp"

namespace ddopt {

void SolverConfig::validate() const {
  if (!(residual_tol > 0.0)) throw std::invalid_argument("residual_tol must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be positive");
  if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("damping must be in (0, 1]");
  if (continuation_start && !(*continuation_start > 0.0)) {
    throw std::invalid_argument("continuation_start must be positive");
  }
  if (continuation_steps && *continuation_steps < 1) {
    throw std::invalid_argument("continuation_steps must be positive");
  }
  if (restarts < 0) throw std::invalid_argument("restarts must be nonnegative");
  if (!(restart_magnitude > 0.0)) throw std::invalid_argument("restart_magnitude must be positive");
  if (max_refinements < 0) throw std::invalid_argument("max_refinements must be nonnegative");
}

std::vector<double> stationarity_residual(const PulseSequence& seq, double z_c) {
  return gradient(seq, z_c);
}

std::vector<double> continuation_schedule(double z_c_target, const SolverConfig& config) {
  if (!std::isfinite(z_c_target) || z_c_target <= 0.0) {
    throw std::invalid_argument("z_c must be positive");
  }
  const double start = std::min(config.continuation_start.value_or(std::min(1.0, z_c_target)),
                                z_c_target);
  const int steps = config.continuation_steps.value_or(
      std::min(64, std::max(1, static_cast<int>(std::ceil(z_c_target)))));
  if (steps <= 1 || start >= z_c_target) return {z_c_target};
  std::vector<double> schedule;
  schedule.reserve(static_cast<std::size_t>(steps));
  for (int k = 0; k + 1 < steps; ++k) {
    schedule.push_back(start + (z_c_target - start) * k / (steps - 1));
  }
  schedule.push_back(z_c_target);
  return schedule;
}

namespace {

using X = Extended;
using Vec = std::vector<X>;
using XMatrix = kernels::Matrix<X>;
using XVector = Eigen::Matrix<X, Eigen::Dynamic, 1>;

const X kEps = std::numeric_limits<X>::epsilon();
const X kStepTol(1e-20);
// True minima can have a Hessian spread of 1e-12 or more, so negative
// curvature is judged against quad-precision noise only.
const X kConvexityTol(1e-24);
// Longest move of any pulse time in one Newton step.
const X kMaxStep(0.05);

Vec to_extended(std::span<const double> deltas) { return Vec(deltas.begin(), deltas.end()); }

Vec with_boundaries(const Vec& interior) {
  Vec times;
  times.reserve(interior.size() + 2);
  times.push_back(X(0));
  times.insert(times.end(), interior.begin(), interior.end());
  times.push_back(X(1));
  return times;
}

bool feasible(const Vec& interior) {
  const X gap(kMinSeparation);
  X previous(0);
  for (const X& d : interior) {
    if (!(d - previous >= gap)) return false;
    previous = d;
  }
  return X(1) - previous >= gap;
}

X max_abs(const Vec& v) {
  X m(0);
  for (const X& x : v) m = std::max(m, X(abs(x)));
  return m;
}

X squared_norm(const Vec& v) {
  X s(0);
  for (const X& x : v) s += x * x;
  return s;
}

struct Eval {
  Vec g;
  X residual;
  X noise;
};

Eval evaluate(const Vec& interior, X zc) {
  const Vec times = with_boundaries(interior);
  auto grad = kernels::gradient<X>(times, zc);
  const X residual = max_abs(grad.values);
  return {std::move(grad.values), residual, 64 * kEps * grad.magnitude};
}

X objective_ext(const Vec& interior, X zc) {
  const Vec times = with_boundaries(interior);
  return kernels::series_objective<X>(times, zc, SeriesParams::extended()).value;
}

XMatrix hessian_ext(const Vec& interior, X zc) {
  const Vec times = with_boundaries(interior);
  return kernels::hessian<X>(times, zc);
}

// Closest double sequence to an extended iterate, or nullopt if rounding
// breaks the separation rule.
std::optional<PulseSequence> round_to_sequence(const Vec& interior) {
  std::vector<double> deltas;
  deltas.reserve(interior.size());
  for (const X& d : interior) deltas.push_back(static_cast<double>(d));
  try {
    return PulseSequence(std::move(deltas));
  } catch (const SequenceError&) {
    return std::nullopt;
  }
}

struct Curvature {
  X min_eigenvalue;
  X max_abs_eigenvalue;
};

Curvature curvature_of(const XMatrix& h) {
  Eigen::SelfAdjointEigenSolver<XMatrix> es(h, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  X largest(0);
  for (Eigen::Index k = 0; k < ev.size(); ++k) largest = std::max(largest, X(abs(ev[k])));
  return {ev.minCoeff(), largest};
}

enum class NewtonStatus { Converged, Stalled, IterationLimit };

struct NewtonOutcome {
  Vec x;
  X residual;
  int iterations = 0;
  NewtonStatus status = NewtonStatus::Stalled;
};

// Moves off a stationary point with negative curvature along the most
// negative eigenvector, trying both signs and shrinking the move until I_n
// drops.
std::optional<Vec> escape_saddle(const Vec& x, X zc, X value, const XMatrix& h) {
  Eigen::SelfAdjointEigenSolver<XMatrix> es(h);
  const auto& ev = es.eigenvalues();
  if (!(ev[0] < -kConvexityTol * X(ev.cwiseAbs().maxCoeff()))) return std::nullopt;
  const XVector v = es.eigenvectors().col(0) / es.eigenvectors().col(0).cwiseAbs().maxCoeff();
  Vec trial(x.size());
  for (X alpha = kMaxStep; alpha >= X(1e-10); alpha /= 2) {
    for (int sign : {1, -1}) {
      for (std::size_t k = 0; k < x.size(); ++k) {
        trial[k] = x[k] + sign * alpha * v[static_cast<Eigen::Index>(k)];
      }
      if (feasible(trial) && objective_ext(trial, zc) < value) return trial;
    }
  }
  return std::nullopt;
}

// Damped Newton on the stationarity residual. Where the Hessian is not
// positive definite its eigenvalues are replaced by their magnitudes and steps
// must then lower I_n; stationary points with negative curvature are left
// along the descending eigenvector. Every trial point respects the ordering
// and separation rules.
NewtonOutcome newton(Vec x, X zc, const SolverConfig& config) {
  const X tol(config.residual_tol);
  const std::size_t n = x.size();
  Eval e = evaluate(x, zc);
  X value = objective_ext(x, zc);
  auto restart_from = [&](Vec next) {
    x = std::move(next);
    e = evaluate(x, zc);
    value = objective_ext(x, zc);
  };
  for (int it = 0; it < config.max_iters; ++it) {
    XMatrix h = hessian_ext(x, zc);
    Eigen::LLT<XMatrix> llt(h);
    const bool positive_definite = llt.info() == Eigen::Success;
    if (e.residual <= e.noise) {
      if (positive_definite) return {x, e.residual, it, NewtonStatus::Converged};
      if (auto away = escape_saddle(x, zc, value, h)) {
        restart_from(std::move(*away));
        continue;
      }
      return {x, e.residual, it, NewtonStatus::Converged};
    }

    XVector g(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) g[static_cast<Eigen::Index>(k)] = e.g[k];

    XVector step;
    if (positive_definite) {
      step = -llt.solve(g);
    } else {
      // Eigenvalues replaced by their magnitudes: descent along negative
      // curvature with a Newton-sized step.
      Eigen::SelfAdjointEigenSolver<XMatrix> es(h);
      const auto& ev = es.eigenvalues();
      const auto& v = es.eigenvectors();
      const X floor = kConvexityTol * std::max(X(ev.cwiseAbs().maxCoeff()), X(1e-300));
      step = XVector::Zero(g.size());
      for (Eigen::Index k = 0; k < ev.size(); ++k) {
        step -= v.col(k) * (v.col(k).dot(g) / std::max(X(abs(ev[k])), floor));
      }
    }
    bool finite = true;
    X full_step(0);
    for (Eigen::Index k = 0; k < step.size(); ++k) {
      finite = finite && isfinite(step[k]);
      full_step = std::max(full_step, X(abs(step[k])));
    }
    if (!finite) break;
    if (full_step > kMaxStep) step *= kMaxStep / full_step;
    // I_n and its gradient can sit far below residual_tol at small z_c, so
    // the iteration runs until the Newton step itself vanishes.
    if (positive_definite && full_step <= kStepTol && e.residual <= tol) {
      return {x, e.residual, it, NewtonStatus::Converged};
    }

    const X slope = g.dot(step);
    const X g2 = squared_norm(e.g);
    X t(config.damping);
    bool accepted = false;
    Vec trial(n);
    Eval trial_eval;
    X trial_value(0);
    while (t >= X(1e-12)) {
      for (std::size_t k = 0; k < n; ++k) trial[k] = x[k] + t * step[static_cast<Eigen::Index>(k)];
      if (feasible(trial)) {
        trial_eval = evaluate(trial, zc);
        trial_value = objective_ext(trial, zc);
        const bool lowers_objective = trial_value <= value + X(1e-4) * t * slope;
        const bool lowers_residual =
            positive_definite && squared_norm(trial_eval.g) <= (1 - X(1e-4) * t) * g2;
        if (lowers_objective || lowers_residual) {
          accepted = true;
          break;
        }
      }
      t /= 2;
    }
    if (!accepted) {
      if (!positive_definite) {
        if (auto away = escape_saddle(x, zc, value, h)) {
          restart_from(std::move(*away));
          continue;
        }
      }
      return {x, e.residual, it,
              e.residual <= tol ? NewtonStatus::Converged : NewtonStatus::Stalled};
    }
    X step_size(0);
    for (std::size_t k = 0; k < n; ++k) step_size = std::max(step_size, X(abs(trial[k] - x[k])));
    x = trial;
    e = std::move(trial_eval);
    value = trial_value;
    if (positive_definite && e.residual <= tol && step_size <= kStepTol) {
      return {x, e.residual, it + 1, NewtonStatus::Converged};
    }
  }
  return {x, e.residual, config.max_iters,
          e.residual <= tol ? NewtonStatus::Converged : NewtonStatus::IterationLimit};
}

bool locally_convex(const Vec& x, X zc) {
  const Curvature c = curvature_of(hessian_ext(x, zc));
  return c.min_eigenvalue > -kConvexityTol * c.max_abs_eigenvalue;
}

struct PathOutcome {
  Vec x;
  X residual;
  int iterations = 0;
  bool converged = false;
  int refinements = 0;
  std::vector<ContinuationSnapshot> path;
};

class Continuation {
 public:
  Continuation(const SolverConfig& config) : config_(config) {}

  PathOutcome run(Vec start, const std::vector<double>& schedule) {
    out_.x = std::move(start);
    std::optional<X> solved_at;
    for (double z : schedule) {
      advance(solved_at, X(z), 0);
      solved_at = X(z);
    }
    return std::move(out_);
  }

 private:
  // Moves the tracked solution from `from` (nullopt: the start point has not
  // been solved yet) to `to`, halving the step while Newton fails or lands
  // on a point that is not a local minimum.
  void advance(std::optional<X> from, X to, int depth) {
    const Vec origin = out_.x;
    NewtonOutcome r = newton(origin, to, config_);
    out_.iterations += r.iterations;
    const bool good = r.status == NewtonStatus::Converged && locally_convex(r.x, to);
    if (!good && from && depth < config_.max_refinements && out_.refinements < kMaxRefinements) {
      ++out_.refinements;
      const X mid = (*from + to) / 2;
      advance(from, mid, depth + 1);
      advance(mid, to, depth + 1);
      return;
    }
    out_.x = std::move(r.x);
    out_.residual = r.residual;
    out_.converged = r.status == NewtonStatus::Converged;
    if (auto seq = round_to_sequence(out_.x)) {
      out_.path.push_back({static_cast<double>(to), *seq});
    }
  }

  static constexpr int kMaxRefinements = 64;
  const SolverConfig& config_;
  PathOutcome out_;
};

struct Attempt {
  PulseSequence sequence;
  X value;
  double residual = 0.0;
  bool converged = false;
  int iterations = 0;
  int refinements = 0;
  std::vector<ContinuationSnapshot> path;
  MinimumCheck check;
  bool convex = false;

  bool ok() const { return converged && convex && check.verified; }
};

Attempt attempt(const PulseSequence& start, double z_c, const std::vector<double>& schedule,
                const SolverConfig& config) {
  Continuation continuation(config);
  PathOutcome p = continuation.run(to_extended(start.deltas()), schedule);
  Attempt a;
  a.sequence = start;
  if (auto seq = round_to_sequence(p.x)) a.sequence = *seq;
  const Vec rounded = to_extended(a.sequence.deltas());
  a.value = objective_ext(rounded, X(z_c));
  a.residual = static_cast<double>(evaluate(rounded, X(z_c)).residual);
  a.converged = p.converged && a.residual <= config.residual_tol;
  a.iterations = p.iterations;
  a.refinements = p.refinements;
  a.path = std::move(p.path);
  a.check = verify_minimum(a.sequence, z_c, {config.residual_tol, 1e-5, 1e-3, config.seed});
  a.convex = locally_convex(rounded, X(z_c));
  return a;
}

// Uniform double in [0, 1) from the top 53 bits, independent of the standard
// library's distribution implementation.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

PulseSequence perturb(const PulseSequence& seq, double magnitude, std::uint64_t seed) {
  const std::size_t n = seq.n();
  if (n == 0) return seq;
  std::mt19937_64 rng(seed);
  std::vector<double> direction(n);
  double norm = 0.0;
  while (norm == 0.0) {
    norm = 0.0;
    for (double& d : direction) {
      d = 2.0 * unit_uniform(rng) - 1.0;
      norm += d * d;
    }
    norm = std::sqrt(norm);
  }
  double scale = magnitude / norm;
  for (int attempt = 0; attempt < 200; ++attempt, scale /= 2) {
    std::vector<double> moved(n);
    for (std::size_t k = 0; k < n; ++k) moved[k] = seq.deltas()[k] + scale * direction[k];
    try {
      return PulseSequence(std::move(moved));
    } catch (const SequenceError&) {
    }
  }
  return seq;
}

MinimumCheck verify_minimum(const PulseSequence& seq, double z_c, const VerifyOptions& options) {
  MinimumCheck check;
  check.seed = options.seed;
  const std::size_t n = seq.n();
  const X zc(z_c);
  const Vec x = to_extended(seq.deltas());
  check.candidate_value = static_cast<double>(objective_ext(x, zc));
  const Eval e = evaluate(x, zc);
  check.residual_norm = static_cast<double>(e.residual);
  if (n == 0) {
    check.verified = true;
    check.reason = "no free pulse times";
    return check;
  }
  if (!(e.residual <= X(options.residual_tol))) {
    check.reason = "not stationary: residual exceeds tolerance";
    return check;
  }

  // Central differences of the analytic gradient.
  const X h(options.fd_step);
  XMatrix hess(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    Vec plus = x;
    Vec minus = x;
    plus[k] += h;
    minus[k] -= h;
    if (!feasible(plus) || !feasible(minus)) {
      check.reason = "Hessian stencil leaves the feasible region";
      return check;
    }
    const Eval gp = evaluate(plus, zc);
    const Eval gm = evaluate(minus, zc);
    for (std::size_t m = 0; m < n; ++m) {
      hess(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) = (gp.g[m] - gm.g[m]) / (2 * h);
    }
  }
  const XMatrix sym = (hess + hess.transpose()) / 2;
  Eigen::SelfAdjointEigenSolver<XMatrix> es(sym, Eigen::EigenvaluesOnly);
  const X lo = es.eigenvalues().minCoeff();
  const X hi = es.eigenvalues().maxCoeff();
  check.min_eigenvalue = static_cast<double>(lo);
  check.max_eigenvalue = static_cast<double>(hi);
  const bool curvature_ok = hi > 0 && lo > -X(1e-8) * hi;

  const X floor = X(check.candidate_value) - X(1e-12);
  bool perturbations_ok = true;
  for (std::size_t k = 0; k < 2 * n; ++k) {
    const PulseSequence moved = perturb(seq, options.perturbation, options.seed + k);
    const X v = objective_ext(to_extended(moved.deltas()), zc);
    check.perturbed_values.push_back(static_cast<double>(v));
    if (v < floor) perturbations_ok = false;
  }

  check.verified = curvature_ok && perturbations_ok;
  if (!curvature_ok) {
    check.reason = "Hessian has a negative eigenvalue";
  } else if (!perturbations_ok) {
    check.reason = "a nearby perturbation lowers the objective";
  } else {
    check.reason = "local minimum";
  }
  return check;
}

OptimizationResult solve_hlodd(int n, double z_c, const SolverConfig& config) {
  config.validate();
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (!std::isfinite(z_c) || z_c <= 0.0) throw std::invalid_argument("z_c must be positive");
  const PulseSequence baseline = udd(n);
  const PulseSequence start = config.warm_start.value_or(baseline);
  if (start.n() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("warm start has the wrong number of pulses");
  }

  Attempt best = attempt(start, z_c, continuation_schedule(z_c, config), config);
  int restarts_used = 0;
  if (!best.ok()) {
    // Cold restarts at the target cutoff from randomized UDD neighbours.
    const std::vector<double> direct{z_c};
    for (int k = 0; k < config.restarts; ++k) {
      ++restarts_used;
      const PulseSequence s = perturb(baseline, config.restart_magnitude, config.seed + 1000 + k);
      Attempt a = attempt(s, z_c, direct, config);
      if ((a.ok() && !best.ok()) || (a.ok() == best.ok() && a.value < best.value)) {
        best = std::move(a);
      }
    }
  }

  OptimizationResult result;
  result.z_c = z_c;
  result.diagnostics.restarts_used = restarts_used;
  result.diagnostics.refinements = best.refinements;

  const X udd_value = objective_ext(to_extended(baseline.deltas()), X(z_c));
  if (best.value > udd_value) {
    result.sequence = baseline;
    result.objective = {static_cast<double>(udd_value), std::nullopt, Method::Series, 0.0};
    result.residual_norm = static_cast<double>(evaluate(to_extended(baseline.deltas()), X(z_c)).residual);
    result.converged = false;
    result.iterations = best.iterations;
    result.path = std::move(best.path);
    result.minimum_verified = false;
    result.diagnostics.minimum = std::move(best.check);
    result.diagnostics.fell_back_to_udd = true;
    result.diagnostics.message = "iterate above UDD objective; returned UDD";
    return result;
  }

  const auto report = kernels::series_objective<X>(
      with_boundaries(to_extended(best.sequence.deltas())), X(z_c), SeriesParams::extended());
  result.sequence = best.sequence;
  result.objective = {static_cast<double>(report.value), std::nullopt, Method::Series,
                      static_cast<double>(report.error)};
  result.residual_norm = best.residual;
  result.minimum_verified = best.check.verified && best.convex;
  result.converged = best.ok();
  result.iterations = best.iterations;
  result.path = std::move(best.path);
  result.diagnostics.minimum = std::move(best.check);
  if (result.converged) {
    result.diagnostics.message = "converged to a verified local minimum";
  } else if (!best.converged) {
    result.diagnostics.message = "residual above tolerance";
  } else if (!best.convex) {
    result.diagnostics.message = "stationary point has negative curvature";
  } else {
    result.diagnostics.message = "stationary point is not a verified minimum";
  }
  return result;
}

std::string result_to_json(const OptimizationResult& result) {
  nlohmann::ordered_json j;
  j["n"] = result.sequence.n();
  j["z_c"] = result.z_c;
  j["deltas"] = std::vector<double>(result.sequence.deltas().begin(), result.sequence.deltas().end());
  j["I_value"] = result.objective.value;
  j["residual_norm"] = result.residual_norm;
  j["converged"] = result.converged;
  j["minimum_verified"] = result.minimum_verified;
  j["iterations"] = result.iterations;
  auto path = nlohmann::ordered_json::array();
  for (const auto& snap : result.path) {
    path.push_back({{"z_c", snap.z_c},
                    {"deltas", std::vector<double>(snap.sequence.deltas().begin(),
                                                   snap.sequence.deltas().end())}});
  }
  j["continuation_path"] = std::move(path);
  const auto& d = result.diagnostics;
  j["diagnostics"] = {{"message", d.message},
                      {"restarts_used", d.restarts_used},
                      {"refinements", d.refinements},
                      {"fell_back_to_udd", d.fell_back_to_udd},
                      {"minimum_check",
                       {{"verified", d.minimum.verified},
                        {"reason", d.minimum.reason},
                        {"min_eigenvalue", d.minimum.min_eigenvalue},
                        {"max_eigenvalue", d.minimum.max_eigenvalue},
                        {"seed", d.minimum.seed}}}};
  return j.dump();
}

}  // namespace ddopt
