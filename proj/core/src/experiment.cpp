#include "ddopt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace ddopt {

std::string to_string(SequenceMethod method) {
  switch (method) {
    case SequenceMethod::UDD:
      return "UDD";
    case SequenceMethod::PDD:
      return "PDD";
    case SequenceMethod::HLODD:
      return "HLODD";
  }
  return "UDD";
}

SequenceMethod sequence_method_from_string(std::string_view name) {
  if (name == "UDD") return SequenceMethod::UDD;
  if (name == "PDD") return SequenceMethod::PDD;
  if (name == "HLODD") return SequenceMethod::HLODD;
  throw std::invalid_argument("unknown sequence method '" + std::string(name) + "'");
}

namespace {

nlohmann::ordered_json record_json(const ExperimentRecord& r) {
  nlohmann::ordered_json j;
  j["experiment_id"] = r.experiment_id;
  j["n"] = r.n;
  j["omega_c"] = r.omega_c;
  j["t"] = r.t;
  j["method"] = to_string(r.method);
  j["deltas"] = r.deltas;
  j["I_value"] = r.I_value;
  j["residual_norm"] = r.residual_norm ? nlohmann::ordered_json(*r.residual_norm) : nlohmann::ordered_json(nullptr);
  if (r.converged) j["converged"] = *r.converged;
  j["timestamp"] = r.timestamp;
  return j;
}

ExperimentRecord record_from(const nlohmann::json& j) {
  try {
    ExperimentRecord r;
    r.experiment_id = j.at("experiment_id").get<std::string>();
    r.n = j.at("n").get<int>();
    r.omega_c = j.at("omega_c").get<double>();
    r.t = j.at("t").get<double>();
    r.method = sequence_method_from_string(j.at("method").get<std::string>());
    r.deltas = j.at("deltas").get<std::vector<double>>();
    r.I_value = j.at("I_value").get<double>();
    if (j.contains("residual_norm") && !j["residual_norm"].is_null()) {
      r.residual_norm = j["residual_norm"].get<double>();
    }
    if (j.contains("converged")) r.converged = j["converged"].get<bool>();
    r.timestamp = j.at("timestamp").get<std::string>();
    if (!(r.I_value >= 0.0)) throw std::invalid_argument("I_value must be nonnegative");
    if (r.deltas.size() != static_cast<std::size_t>(r.n)) {
      throw std::invalid_argument("deltas length does not match n");
    }
    PulseSequence check(r.deltas);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("invalid experiment record: ") + e.what());
  }
}

nlohmann::json parse_json(std::string_view text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("malformed JSON at byte " + std::to_string(e.byte) + ": " +
                                e.what());
  }
}

// Runs body(k) for k in [0, count) on up to `jobs` threads; the first
// exception is rethrown after all workers finish.
template <class Body>
void parallel_for(std::size_t count, int jobs, Body body) {
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        body(k);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("malformed CSV number '" + s + "' at line " + std::to_string(line_no));
  }
  return v;
}

int parse_int(const std::string& s, std::size_t line_no) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("malformed CSV integer '" + s + "' at line " + std::to_string(line_no));
  }
  return v;
}

template <class Row, class ParseRow>
std::vector<Row> parse_rows(std::string_view text, std::size_t columns, ParseRow parse_row) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<Row> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != columns) {
      throw std::invalid_argument("expected " + std::to_string(columns) + " CSV columns at line " +
                                  std::to_string(line_no));
    }
    rows.push_back(parse_row(fields, line_no));
  }
  return rows;
}

std::string format_ratio(double x) { return std::isinf(x) ? "inf" : format_real(x); }

}  // namespace

std::string record_to_json(const ExperimentRecord& record) { return record_json(record).dump(); }

ExperimentRecord record_from_json(std::string_view text) { return record_from(parse_json(text)); }

std::string records_to_json(const std::vector<ExperimentRecord>& records) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : records) arr.push_back(record_json(r));
  return arr.dump(2);
}

std::vector<ExperimentRecord> records_from_json(std::string_view text) {
  const auto doc = parse_json(text);
  if (!doc.is_array()) throw std::invalid_argument("expected a JSON array of records");
  std::vector<ExperimentRecord> out;
  for (const auto& j : doc) out.push_back(record_from(j));
  return out;
}

std::string iso8601_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

Fig1Result run_fig1(const Fig1Options& options) {
  for (double w : options.omega_c) {
    if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("omega_c must be positive");
  }
  for (int n : options.n) {
    if (n < 1) throw std::invalid_argument("n must be at least 1");
  }
  std::vector<double> omegas = options.omega_c;
  std::vector<int> ns = options.n;
  std::sort(omegas.begin(), omegas.end());
  omegas.erase(std::unique(omegas.begin(), omegas.end()), omegas.end());
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  constexpr double t = 1.0;
  const std::string stamp = options.timestamp.empty() ? iso8601_now() : options.timestamp;
  struct Cell {
    double omega_c;
    int n;
    std::optional<OptimizationResult> result;
  };
  std::vector<Cell> cells;
  for (double w : omegas) {
    for (int n : ns) cells.push_back({w, n, std::nullopt});
  }
  parallel_for(cells.size(), options.jobs, [&](std::size_t k) {
    const CutoffSpec cutoff(cells[k].omega_c, t);
    cells[k].result = solve_hlodd(cells[k].n, cutoff.z_c(), options.solver);
  });

  Fig1Result out;
  for (const Cell& c : cells) {
    const OptimizationResult& r = *c.result;
    const PulseSequence base = udd(c.n);
    const double z_c = CutoffSpec(c.omega_c, t).z_c();
    ExperimentRecord u{"fig1", c.n, c.omega_c, t, SequenceMethod::UDD,
                       std::vector<double>(base.deltas().begin(), base.deltas().end()),
                       objective_quadrature(base, z_c).value, std::nullopt, std::nullopt, stamp};
    ExperimentRecord h{"fig1", c.n, c.omega_c, t, SequenceMethod::HLODD,
                       std::vector<double>(r.sequence.deltas().begin(), r.sequence.deltas().end()),
                       objective_quadrature(r.sequence, z_c).value, r.residual_norm, r.converged,
                       stamp};
    out.records.push_back(std::move(u));
    out.records.push_back(std::move(h));
    out.all_converged = out.all_converged && r.converged;
  }
  out.rows = fig1_rows_from_records(out.records);
  return out;
}

Fig2Result run_fig2(const Fig2Options& options) {
  if (!(options.omega_c > 0.0) || !std::isfinite(options.omega_c)) {
    throw std::invalid_argument("omega_c must be positive");
  }
  if (options.n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  constexpr double t = 1.0;
  const double z_c = CutoffSpec(options.omega_c, t).z_c();
  const std::string stamp = options.timestamp.empty() ? iso8601_now() : options.timestamp;

  std::vector<std::optional<OptimizationResult>> results(static_cast<std::size_t>(options.n_max));
  parallel_for(results.size(), options.jobs, [&](std::size_t k) {
    results[k] = solve_hlodd(static_cast<int>(k) + 1, z_c, options.solver);
  });

  Fig2Result out;
  for (std::size_t k = 0; k < results.size(); ++k) {
    const int n = static_cast<int>(k) + 1;
    const OptimizationResult& r = *results[k];
    const PulseSequence base = udd(n);
    out.records.push_back({"fig2", n, options.omega_c, t, SequenceMethod::UDD,
                           std::vector<double>(base.deltas().begin(), base.deltas().end()),
                           objective_quadrature(base, z_c).value, std::nullopt, std::nullopt, stamp});
    out.records.push_back({"fig2", n, options.omega_c, t, SequenceMethod::HLODD,
                           std::vector<double>(r.sequence.deltas().begin(), r.sequence.deltas().end()),
                           objective_quadrature(r.sequence, z_c).value, r.residual_norm, r.converged,
                           stamp});
    out.all_converged = out.all_converged && r.converged;
  }
  out.rows = fig2_rows_from_records(out.records);
  return out;
}

std::vector<Fig1Row> fig1_rows_from_records(const std::vector<ExperimentRecord>& records) {
  std::map<std::pair<double, int>, std::pair<const ExperimentRecord*, const ExperimentRecord*>> cells;
  for (const auto& r : records) {
    auto& slot = cells[{r.omega_c, r.n}];
    if (r.method == SequenceMethod::UDD) slot.first = &r;
    if (r.method == SequenceMethod::HLODD) slot.second = &r;
  }
  std::vector<Fig1Row> rows;
  for (const auto& [key, pair] : cells) {
    const auto [u, h] = pair;
    if (!u || !h) throw std::invalid_argument("fig1 records need a UDD and an HLODD entry per cell");
    for (int j = 1; j <= key.second; ++j) {
      const double du = u->deltas.at(static_cast<std::size_t>(j - 1));
      const double dh = h->deltas.at(static_cast<std::size_t>(j - 1));
      rows.push_back({key.first, key.second, j, du, dh, std::abs(dh - du), h->converged.value_or(true)});
    }
  }
  return rows;
}

std::vector<Fig2Row> fig2_rows_from_records(const std::vector<ExperimentRecord>& records) {
  std::map<int, std::pair<const ExperimentRecord*, const ExperimentRecord*>> cells;
  for (const auto& r : records) {
    auto& slot = cells[r.n];
    if (r.method == SequenceMethod::UDD) slot.first = &r;
    if (r.method == SequenceMethod::HLODD) slot.second = &r;
  }
  std::vector<Fig2Row> rows;
  for (const auto& [n, pair] : cells) {
    const auto [u, h] = pair;
    if (!u || !h) throw std::invalid_argument("fig2 records need a UDD and an HLODD entry per n");
    const double ratio = h->I_value > 0.0 ? u->I_value / h->I_value
                                          : std::numeric_limits<double>::infinity();
    rows.push_back({n, u->I_value, h->I_value, ratio, h->converged.value_or(true)});
  }
  return rows;
}

std::string fig1_csv(const std::vector<Fig1Row>& rows) {
  std::string out = "omega_c,n,j,delta_udd,delta_hlodd,abs_deviation,converged\n";
  for (const auto& r : rows) {
    out += format_real(r.omega_c) + ',' + std::to_string(r.n) + ',' + std::to_string(r.j) + ',' +
           format_real(r.delta_udd) + ',' + format_real(r.delta_hlodd) + ',' +
           format_real(r.abs_deviation) + ',' + (r.converged ? "1" : "0") + '\n';
  }
  return out;
}

std::vector<Fig1Row> fig1_rows_from_csv(std::string_view text) {
  return parse_rows<Fig1Row>(text, 7, [](const std::vector<std::string>& f, std::size_t line) {
    return Fig1Row{parse_double(f[0], line), parse_int(f[1], line), parse_int(f[2], line),
                   parse_double(f[3], line), parse_double(f[4], line), parse_double(f[5], line),
                   parse_int(f[6], line) != 0};
  });
}

std::string fig2_csv(const std::vector<Fig2Row>& rows) {
  std::string out = "n,I_udd,I_hlodd,ratio,converged\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + ',' + format_real(r.I_udd) + ',' + format_real(r.I_hlodd) + ',' +
           format_ratio(r.ratio) + ',' + (r.converged ? "1" : "0") + '\n';
  }
  return out;
}

std::vector<Fig2Row> fig2_rows_from_csv(std::string_view text) {
  return parse_rows<Fig2Row>(text, 5, [](const std::vector<std::string>& f, std::size_t line) {
    return Fig2Row{parse_int(f[0], line), parse_double(f[1], line), parse_double(f[2], line),
                   parse_double(f[3], line), parse_int(f[4], line) != 0};
  });
}

std::string fig1_gnuplot(const std::string& csv_path) {
  return "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set xlabel 'pulse index j'\n"
         "set ylabel 'delta_j'\n"
         "set title 'UDD vs HLODD pulse positions'\n"
         "plot '" + csv_path + "' using 3:4 with points pt 6 title 'UDD', \\\n"
         "     '" + csv_path + "' using 3:5 with points pt 7 title 'HLODD'\n";
}

std::string fig2_gnuplot(const std::string& csv_path) {
  return "set datafile separator ','\n"
         "set logscale y\n"
         "set xlabel 'n'\n"
         "set ylabel 'I_n'\n"
         "set title 'I_n versus pulse number'\n"
         "plot '" + csv_path + "' using 1:2 with linespoints title 'UDD', \\\n"
         "     '" + csv_path + "' using 1:3 with linespoints title 'HLODD'\n";
}

}  // namespace ddopt
