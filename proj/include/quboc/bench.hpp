#pragma once

// Scaling harness: times expression construction and compilation for the
// graph-partition and TSP generators and fits log-log slopes against the
// number of terms.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#if defined(__unix__) || defined(__APPLE__)
#include <sys/resource.h>
#endif

#include "quboc/error.hpp"
#include "quboc/model.hpp"
#include "quboc/problems.hpp"

namespace quboc {

enum class BenchProblem { GraphPartition, Tsp };

inline std::string_view to_string(BenchProblem p) {
  return p == BenchProblem::GraphPartition ? "gp" : "tsp";
}

struct BenchRecord {
  BenchProblem problem;
  std::size_t size;
  std::size_t num_qubo_vars;
  std::size_t num_terms;
  double expression_time_s;
  double compile_time_s;
  std::uint64_t peak_memory_bytes;
};

struct BenchOptions {
  /// Each timing repeats the work until at least this long has elapsed.
  double min_duration_s = 0.05;
  /// Timings are the median of this many repetitions.
  int runs = 3;
};

struct ScalingResult {
  std::vector<BenchRecord> records;
  /// Least-squares slope of log(time) on log(num_terms); needs >= 3 sizes.
  std::optional<double> expression_slope;
  std::optional<double> compile_slope;
};

/// Peak resident set size of this process, 0 where unavailable.
inline std::uint64_t peak_memory_bytes() {
#if defined(__unix__) || defined(__APPLE__)
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0) return 0;
#if defined(__APPLE__)
  return static_cast<std::uint64_t>(usage.ru_maxrss);
#else
  return static_cast<std::uint64_t>(usage.ru_maxrss) * 1024U;
#endif
#else
  return 0;
#endif
}

inline std::optional<double> fit_loglog_slope(const std::vector<double>& x,
                                              const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) return std::nullopt;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

namespace detail {

/// Median over `runs` of the mean time per call of `work`, repeating each run
/// until `min_duration` has passed. `reset` runs untimed after each run.
template <typename Work, typename Reset>
double time_median(const BenchOptions& opts, Work&& work, Reset&& reset) {
  using clock = std::chrono::steady_clock;
  std::vector<double> samples;
  for (int r = 0; r < std::max(1, opts.runs); ++r) {
    std::size_t calls = 0;
    double elapsed = 0.0;
    do {
      const auto t0 = clock::now();
      work();
      elapsed += std::chrono::duration<double>(clock::now() - t0).count();
      ++calls;
    } while (elapsed < opts.min_duration_s);
    samples.push_back(elapsed / static_cast<double>(calls));
    reset();
  }
  std::sort(samples.begin(), samples.end());
  return samples[samples.size() / 2];
}

}  // namespace detail

inline BenchRecord bench_one(BenchProblem problem, std::size_t size, std::uint64_t seed,
                             const BenchOptions& opts = {}) {
  auto build = [&]() -> std::pair<Expr, PlaceholderValues> {
    if (problem == BenchProblem::GraphPartition) {
      return {gen_graph_partition(size, 0.3, seed).hamiltonian, graph_partition_feed()};
    }
    TspProblem t = gen_tsp(size, seed);
    PlaceholderValues feed = tsp_feed(t);
    return {std::move(t.hamiltonian), std::move(feed)};
  };

  // Built expressions are kept alive so teardown stays out of the timing.
  std::vector<Expr> kept;
  const double expression_time = detail::time_median(
      opts, [&] { kept.push_back(build().first); }, [&] { kept.clear(); });

  auto [h, feed] = build();
  std::size_t vars = 0;
  std::size_t terms = 0;
  const double compile_time = detail::time_median(
      opts,
      [&] {
        const Model m = compile(h);
        const QuboMap q = m.to_qubo(feed);
        vars = m.num_variables();
        terms = m.polynomial().size();
        (void)q;
      },
      [] {});
  return {problem, size, vars, terms, expression_time, compile_time, peak_memory_bytes()};
}

inline ScalingResult run_scaling(BenchProblem problem, const std::vector<std::size_t>& sizes,
                                 std::uint64_t seed = 0, const BenchOptions& opts = {}) {
  if (sizes.empty()) throw Error(ErrorCode::InvalidArgument, "no sizes given");
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] <= sizes[i - 1]) throw Error(ErrorCode::InvalidArgument, "sizes must ascend");
  }
  ScalingResult out;
  std::vector<double> terms;
  std::vector<double> expr_t;
  std::vector<double> comp_t;
  for (std::size_t s : sizes) {
    out.records.push_back(bench_one(problem, s, seed, opts));
    terms.push_back(static_cast<double>(out.records.back().num_terms));
    expr_t.push_back(out.records.back().expression_time_s);
    comp_t.push_back(out.records.back().compile_time_s);
  }
  out.expression_slope = fit_loglog_slope(terms, expr_t);
  out.compile_slope = fit_loglog_slope(terms, comp_t);
  return out;
}

inline constexpr std::string_view kBenchCsvHeader =
    "problem,size,num_qubo_vars,num_terms,expression_time_s,compile_time_s,peak_memory_bytes";

inline std::string to_csv(const std::vector<BenchRecord>& records) {
  std::string out(kBenchCsvHeader);
  out += '\n';
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%zu,%.9g,%.9g,%llu\n",
                  std::string(to_string(r.problem)).c_str(), r.size, r.num_qubo_vars, r.num_terms,
                  r.expression_time_s, r.compile_time_s,
                  static_cast<unsigned long long>(r.peak_memory_bytes));
    out += buf;
  }
  return out;
}

inline std::string to_jsonl(const std::vector<BenchRecord>& records) {
  std::string out;
  char buf[320];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf,
                  "{\"problem\": \"%s\", \"size\": %zu, \"num_qubo_vars\": %zu, \"num_terms\": %zu, "
                  "\"expression_time_s\": %.9g, \"compile_time_s\": %.9g, "
                  "\"peak_memory_bytes\": %llu}\n",
                  std::string(to_string(r.problem)).c_str(), r.size, r.num_qubo_vars, r.num_terms,
                  r.expression_time_s, r.compile_time_s,
                  static_cast<unsigned long long>(r.peak_memory_bytes));
    out += buf;
  }
  return out;
}

}  // namespace quboc
