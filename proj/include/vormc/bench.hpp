// Copyright 2026 The vormc Authors
// SPDX-License-Identifier: Apache-2.0

// Replication harness: repeated independent estimates per (method, n) cell,
// summary statistics, log-log variance slopes and report writers.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vormc/errors.hpp"
#include "vormc/estimators.hpp"
#include "vormc/functions.hpp"
#include "vormc/parallel.hpp"

namespace vormc {

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = sum_ + y;
    c_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0, c_ = 0.0;
};

struct SampleStats {
  std::size_t count = 0;
  double mean = 0.0;
  double std_dev = 0.0;  ///< unbiased (divisor count - 1)

  double variance() const { return std_dev * std_dev; }
  double std_error() const { return count > 0 ? std_dev / std::sqrt(double(count)) : 0.0; }
};

inline SampleStats summarize(std::span<const double> xs) {
  SampleStats s;
  s.count = xs.size();
  if (xs.empty()) return s;
  KahanSum sum;
  for (double x : xs) sum.add(x);
  s.mean = sum.value() / double(xs.size());
  if (xs.size() > 1) {
    KahanSum sq;
    for (double x : xs) sq.add((x - s.mean) * (x - s.mean));
    s.std_dev = std::sqrt(sq.value() / double(xs.size() - 1));
  }
  return s;
}

inline double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  const std::size_t mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + mid, xs.end());
  const double hi = xs[mid];
  if (xs.size() % 2 == 1) return hi;
  return 0.5 * (hi + *std::max_element(xs.begin(), xs.begin() + mid));
}

/// Least-squares slope of y against x.
inline double ls_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Spec and report
// ---------------------------------------------------------------------------

struct FunctionSpec {
  std::string name = "holder";
  std::optional<double> alpha = 1.0;

  std::string label() const { return make_function(name, alpha).name; }
};

struct BenchSpec {
  FunctionSpec function;
  std::vector<Method> methods{Method::mc, Method::vor, Method::fvor};
  std::vector<std::uint64_t> n_values{32, 64, 128, 256, 512, 1024, 2048, 4096};
  std::size_t replications = 1000;
  std::uint64_t seed = 0;
  CountMode mode = CountMode::fixed;
  double delta = 1e-3;
  unsigned threads = 0;

  void validate() const {
    if (methods.empty()) throw InvalidArgument("bench needs at least one method");
    if (n_values.empty()) throw InvalidArgument("bench needs at least one n value");
    if (!std::is_sorted(n_values.begin(), n_values.end()) ||
        std::adjacent_find(n_values.begin(), n_values.end()) != n_values.end())
      throw InvalidArgument("n_values must be strictly ascending");
    if (n_values.front() < 1) throw InvalidArgument("n values must be positive");
    if (replications < 2) throw InvalidArgument("replications must be >= 2");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidConfidence("delta must lie in (0, 1)");
  }
};

struct BenchCell {
  Method method = Method::mc;
  std::uint64_t n = 0;
  SampleStats stats;
  double mean_time_ms = 0.0;
  double median_time_ms = 0.0;
  std::size_t failures = 0;  ///< replications that raised an estimator error
  bool flagged = false;      ///< more than 1% failed
  std::uint64_t retries = 0; ///< rejected or redrawn configurations

  /// Variance times median CPU time per estimate: lower is more efficient.
  double variance_time_product() const { return stats.variance() * median_time_ms; }
};

struct MethodSummary {
  Method method = Method::mc;
  std::optional<double> slope;  ///< d log Var / d log n
};

struct BenchReport {
  std::string function;
  std::optional<double> exact_value;
  std::vector<BenchCell> cells;
  std::vector<MethodSummary> methods;

  const BenchCell* find(Method m, std::uint64_t n) const {
    for (const auto& c : cells)
      if (c.method == m && c.n == n) return &c;
    return nullptr;
  }
  std::optional<double> slope(Method m) const {
    for (const auto& s : methods)
      if (s.method == m) return s.slope;
    return std::nullopt;
  }
};

/// Slope of log variance against log n, skipping up to the two smallest n
/// as long as three points remain. Undefined with fewer than three n values.
inline std::optional<double> variance_slope(const std::vector<BenchCell>& cells) {
  if (cells.size() < 3) return std::nullopt;
  const std::size_t skip = std::min<std::size_t>(2, cells.size() - 3);
  std::vector<double> x, y;
  for (std::size_t i = skip; i < cells.size(); ++i) {
    if (!(cells[i].stats.variance() > 0.0)) return std::nullopt;
    x.push_back(std::log(double(cells[i].n)));
    y.push_back(std::log(cells[i].stats.variance()));
  }
  return ls_slope(x, y);
}

/// Stream id of one replication; distinct for every (method, n, replication).
inline std::uint64_t replication_stream(Method m, std::uint64_t n, std::size_t r) {
  return (std::uint64_t(m) << 56) ^ (n << 24) ^ std::uint64_t(r);
}

/// Replicated estimates for a single (method, n) cell. Values of failed
/// replications are dropped; `values` is index-ordered otherwise.
struct CellRun {
  std::vector<double> values;
  std::vector<double> times_ms;
  std::size_t failures = 0;
  std::uint64_t retries = 0;
};

inline CellRun run_cell(const Integrand& f, Method method, std::uint64_t n,
                        std::size_t replications, std::uint64_t seed, CountMode mode,
                        double delta, unsigned threads) {
  SpppParams params;
  if (method == Method::vor || method == Method::fvor)
    params = SpppParams::for_intensity(double(n), delta, mode);
  else
    params.intensity_n = double(n);
  const Window w = f.support;

  std::vector<std::optional<EstimateReport>> out(replications);
  parallel_for(replications, threads, [&](std::size_t r) {
    Rng rng(seed, replication_stream(method, n, r));
    try {
      out[r] = estimate(method, rng, f, params, w);
    } catch (const RejectionExhausted&) {
    } catch (const EmptyFilter&) {
    }
  });

  CellRun run;
  for (const auto& rep : out) {
    if (!rep) {
      ++run.failures;
      continue;
    }
    run.values.push_back(rep->value);
    run.times_ms.push_back(rep->wall_ms());
    run.retries += std::uint64_t(rep->retries);
  }
  return run;
}

inline BenchReport run_bench(const BenchSpec& spec) {
  spec.validate();
  const Integrand f = make_function(spec.function.name, spec.function.alpha);
  BenchReport report;
  report.function = f.name;
  report.exact_value = f.exact_value;
  for (Method m : spec.methods) {
    std::vector<BenchCell> cells;
    for (std::uint64_t n : spec.n_values) {
      const CellRun run =
          run_cell(f, m, n, spec.replications, spec.seed, spec.mode, spec.delta, spec.threads);
      BenchCell cell;
      cell.method = m;
      cell.n = n;
      cell.stats = summarize(run.values);
      cell.failures = run.failures;
      cell.flagged = double(run.failures) > 0.01 * double(spec.replications);
      cell.retries = run.retries;
      cell.mean_time_ms = summarize(run.times_ms).mean;
      cell.median_time_ms = median(run.times_ms);
      cells.push_back(cell);
    }
    report.methods.push_back({m, variance_slope(cells)});
    report.cells.insert(report.cells.end(), cells.begin(), cells.end());
  }
  return report;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// Six significant digits, the precision used in every report file.
inline std::string format_g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string report_csv(const BenchReport& report) {
  std::ostringstream os;
  os << "function,method,n,mean,std_dev,time_ms,slope\n";
  for (const auto& c : report.cells) {
    const auto slope = report.slope(c.method);
    os << report.function << ',' << to_string(c.method) << ',' << c.n << ','
       << format_g6(c.stats.mean) << ',' << format_g6(c.stats.std_dev) << ','
       << format_g6(c.mean_time_ms) << ',' << (slope ? format_g6(*slope) : "") << '\n';
  }
  return os.str();
}

inline nlohmann::json report_json(const BenchReport& report) {
  nlohmann::json j;
  j["function"] = report.function;
  j["exact_value"] = report.exact_value ? nlohmann::json(*report.exact_value) : nlohmann::json();
  j["cells"] = nlohmann::json::array();
  for (const auto& c : report.cells) {
    j["cells"].push_back({{"method", to_string(c.method)},
                          {"n", c.n},
                          {"replications", c.stats.count},
                          {"mean", c.stats.mean},
                          {"std_dev", c.stats.std_dev},
                          {"mean_time_ms", c.mean_time_ms},
                          {"median_time_ms", c.median_time_ms},
                          {"variance_time_product", c.variance_time_product()},
                          {"failures", c.failures},
                          {"flagged", c.flagged},
                          {"retries", c.retries}});
  }
  j["methods"] = nlohmann::json::array();
  for (const auto& m : report.methods)
    j["methods"].push_back(
        {{"method", to_string(m.method)},
         {"slope", m.slope ? nlohmann::json(*m.slope) : nlohmann::json()}});
  return j;
}

/// Long-format convergence bands: one row per (method, n) with mean +- sigma.
inline std::string report_bands(const BenchReport& report) {
  std::ostringstream os;
  os << "# method n mean lower upper\n";
  for (const auto& c : report.cells)
    os << to_string(c.method) << ' ' << c.n << ' ' << format_g6(c.stats.mean) << ' '
       << format_g6(c.stats.mean - c.stats.std_dev) << ' '
       << format_g6(c.stats.mean + c.stats.std_dev) << '\n';
  return os.str();
}

/// Long-format efficiency curve: variance against median CPU time.
inline std::string report_efficiency(const BenchReport& report) {
  std::ostringstream os;
  os << "# method n median_time_ms variance\n";
  for (const auto& c : report.cells)
    os << to_string(c.method) << ' ' << c.n << ' ' << format_g6(c.median_time_ms) << ' '
       << format_g6(c.stats.variance()) << '\n';
  return os.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

/// Writes report.csv, report.json, bands.dat and efficiency.dat into `dir`.
inline void emit_report(const BenchReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  write_text(dir / "report.csv", report_csv(report));
  write_text(dir / "report.json", report_json(report).dump(2) + "\n");
  write_text(dir / "bands.dat", report_bands(report));
  write_text(dir / "efficiency.dat", report_efficiency(report));
}

// ---------------------------------------------------------------------------
// Spec parsing
// ---------------------------------------------------------------------------

inline BenchSpec bench_spec_from_json(const nlohmann::json& j) {
  BenchSpec spec;
  try {
    if (j.contains("function")) {
      const auto& fj = j.at("function");
      if (fj.is_string()) {
        spec.function.name = fj.get<std::string>();
        spec.function.alpha.reset();
      } else {
        spec.function.name = fj.at("name").get<std::string>();
        spec.function.alpha.reset();
        if (fj.contains("alpha") && !fj.at("alpha").is_null())
          spec.function.alpha = fj.at("alpha").get<double>();
      }
    }
    if (j.contains("methods")) {
      spec.methods.clear();
      for (const auto& m : j.at("methods")) spec.methods.push_back(parse_method(m.get<std::string>()));
    }
    if (j.contains("n_values")) spec.n_values = j.at("n_values").get<std::vector<std::uint64_t>>();
    if (j.contains("replications")) spec.replications = j.at("replications").get<std::size_t>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("mode")) spec.mode = parse_count_mode(j.at("mode").get<std::string>());
    if (j.contains("delta")) spec.delta = j.at("delta").get<double>();
    if (j.contains("threads")) spec.threads = j.at("threads").get<unsigned>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed bench spec: ") + e.what());
  }
  make_function(spec.function.name, spec.function.alpha);  // validates the name early
  spec.validate();
  return spec;
}

inline nlohmann::json bench_spec_to_json(const BenchSpec& spec) {
  nlohmann::json methods = nlohmann::json::array();
  for (Method m : spec.methods) methods.push_back(to_string(m));
  nlohmann::json fn = {{"name", spec.function.name}};
  fn["alpha"] = spec.function.alpha ? nlohmann::json(*spec.function.alpha) : nlohmann::json();
  return {{"function", fn},       {"methods", methods},
          {"n_values", spec.n_values}, {"replications", spec.replications},
          {"seed", spec.seed},    {"mode", to_string(spec.mode)},
          {"delta", spec.delta},  {"threads", spec.threads}};
}

}  // namespace vormc
