#pragma once

// Subcommand implementations for the quboc tool. Each returns the process
// exit code: 0 success, 2 a negative verdict (broken constraints, unequal
// files), 1 error. Argument parsing lives in main.cpp.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "quboc/quboc.hpp"

namespace quboc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNegative = 2;

/// Comma-separated list of integers ("4,2,7,1").
template <typename Int>
std::vector<Int> parse_int_list(const std::string& text, const char* what) {
  std::vector<Int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw Error(ErrorCode::InvalidArgument,
                  std::string("malformed ") + what + " list '" + text + "'");
    }
    if constexpr (std::is_unsigned_v<Int>) {
      if (v < 0) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be non-negative");
    }
    out.push_back(static_cast<Int>(v));
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, std::string("empty ") + what + " list");
  return out;
}

/// key=value pairs; each entry may itself hold comma-separated pairs.
inline PlaceholderValues parse_feed(const std::vector<std::string>& entries) {
  PlaceholderValues feed;
  for (const auto& entry : entries) {
    std::stringstream ss(entry);
    std::string pair;
    while (std::getline(ss, pair, ',')) {
      const auto eq = pair.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw Error(ErrorCode::InvalidArgument, "feed entry '" + pair + "' is not key=value");
      }
      std::size_t used = 0;
      double v = 0.0;
      const std::string value = pair.substr(eq + 1);
      try {
        v = std::stod(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != value.size()) {
        throw Error(ErrorCode::InvalidArgument, "feed value '" + value + "' is not a number");
      }
      feed[pair.substr(0, eq)] = v;
    }
  }
  return feed;
}

/// Rejects feed keys the model does not use, then layers `given` over
/// `defaults`.
inline PlaceholderValues merge_feed(const Model& m, const PlaceholderValues& defaults,
                                    const PlaceholderValues& given) {
  std::vector<std::string> unknown;
  for (const auto& [k, v] : given) {
    if (!m.placeholders().contains(k)) unknown.push_back(k);
  }
  if (!unknown.empty()) {
    throw Error(ErrorCode::InvalidArgument, "unknown feed key(s) " + detail::join_labels(unknown));
  }
  PlaceholderValues feed = defaults;
  for (const auto& [k, v] : given) feed[k] = v;
  return feed;
}

inline void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  f << text;
  if (!f) throw Error(ErrorCode::InvalidArgument, "failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// gen

struct GenOptions {
  std::string problem;  // number-partition | knapsack | graph-partition | tsp | factoring
  std::string numbers;  // number-partition
  std::string weights;  // knapsack
  std::string values;
  long long max_weight = 0;
  std::string encoding = "one-hot";
  std::size_t nodes = 0;  // graph-partition
  double density = 0.3;
  std::size_t cities = 0;  // tsp
  std::uint64_t product = 0;  // factoring
  std::string bits;
  std::uint64_t seed = 0;
  std::vector<std::string> feed;
  std::string out;
};

/// Compiled model plus the feed it is emitted with.
struct GeneratedModel {
  Model model;
  PlaceholderValues feed;
};

inline GeneratedModel generate(const GenOptions& o) {
  const PlaceholderValues given = parse_feed(o.feed);
  auto finish = [&](const Expr& h, const PlaceholderValues& defaults) {
    Model m = compile(h);
    PlaceholderValues feed = merge_feed(m, defaults, given);
    return GeneratedModel{std::move(m), std::move(feed)};
  };
  if (o.problem == "number-partition") {
    return finish(number_partition(parse_int_list<long long>(o.numbers, "number")), {});
  }
  if (o.problem == "knapsack") {
    SlackEncoding enc;
    if (o.encoding == "one-hot") {
      enc = SlackEncoding::OneHot;
    } else if (o.encoding == "log") {
      enc = SlackEncoding::Log;
    } else {
      throw Error(ErrorCode::InvalidArgument, "encoding must be one-hot or log");
    }
    const KnapsackProblem k = knapsack(parse_int_list<long long>(o.weights, "weight"),
                                       parse_int_list<long long>(o.values, "value"),
                                       o.max_weight, enc);
    return finish(k.hamiltonian, {});
  }
  if (o.problem == "graph-partition") {
    return finish(gen_graph_partition(o.nodes, o.density, o.seed).hamiltonian,
                  graph_partition_feed());
  }
  if (o.problem == "tsp") {
    const TspProblem t = gen_tsp(o.cities, o.seed);
    return finish(t.hamiltonian, tsp_feed(t));
  }
  if (o.problem == "factoring") {
    const auto widths = parse_int_list<std::size_t>(o.bits, "bit width");
    if (widths.size() != 2) throw Error(ErrorCode::InvalidArgument, "--bits takes two widths, e.g. 3,3");
    return finish(factoring_problem(o.product, widths[0], widths[1]).hamiltonian, {});
  }
  throw Error(ErrorCode::InvalidArgument, "unknown problem '" + o.problem + "'");
}

inline int cmd_gen(const GenOptions& o, std::ostream& out) {
  const GeneratedModel g = generate(o);
  write_output(emit(from_model(g.model, g.feed)), o.out, out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// solve

struct SolveOptions {
  std::string input;
  std::string method = "exact";  // exact | eliminate | sa
  std::size_t max_vars = 24;
  std::size_t num_reads = 10;
  std::size_t sweeps = 1000;
  std::string beta = "1.0:50.0";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool normalize = true;
  bool spin = false;  // print values as spins
};

inline std::pair<double, double> parse_beta(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::InvalidArgument, "--beta takes MIN:MAX, got '" + text + "'");
  }
  try {
    std::size_t a = 0;
    std::size_t b = 0;
    const std::string lo = text.substr(0, colon);
    const std::string hi = text.substr(colon + 1);
    const double x = std::stod(lo, &a);
    const double y = std::stod(hi, &b);
    if (a == lo.size() && b == hi.size()) return {x, y};
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidArgument, "--beta takes MIN:MAX, got '" + text + "'");
}

/// Lowest-energy decoded sample among the solver's records.
inline DecodedSample solve_file(const QuboFile& f, const SolveOptions& o) {
  const QuboMap q = f.to_qubo_map();
  SampleSet ss({});
  if (o.method == "exact") {
    ss = exact_solve(q, {o.max_vars, 1});
  } else if (o.method == "eliminate") {
    ss = ground_states(q, {}).states;
  } else if (o.method == "sa") {
    const auto [bmin, bmax] = parse_beta(o.beta);
    ss = sa_sample(o.normalize ? normalize(q) : q,
                   {o.num_reads, o.sweeps, bmin, bmax, o.seed, o.threads});
  } else {
    throw Error(ErrorCode::InvalidArgument, "method must be exact, eliminate or sa");
  }
  // Solver energies may be normalised; rank by the file's own energy.
  std::optional<DecodedSample> best_sample;
  for (std::size_t i = 0; i < ss.size(); ++i) {
    DecodedSample d = f.decode(ss.sample(i));
    if (!best_sample || d.energy < best_sample->energy) best_sample = std::move(d);
  }
  return *best_sample;
}

inline std::string format_report(const DecodedSample& d, bool spin) {
  std::ostringstream os;
  os << "energy: " << detail::format_real(d.energy) << '\n' << "sample:\n";
  for (const auto& [label, v] : d.sample.values) {
    os << "  " << label << " = " << (spin ? 2 * v - 1 : v) << '\n';
  }
  const ConstraintReport broken = broken_constraints(d);
  os << "constraints: " << d.constraints.size() << ", broken: " << broken.size() << '\n';
  for (const auto& [label, st] : broken) {
    os << "  " << label << " penalty " << detail::format_real(st.energy) << '\n';
  }
  return os.str();
}

inline int cmd_solve(const SolveOptions& o, std::ostream& out) {
  const DecodedSample d = solve_file(read_qubo_file(o.input), o);
  out << format_report(d, o.spin);
  return broken_constraints(d).empty() ? kExitOk : kExitNegative;
}

// ---------------------------------------------------------------------------
// bench

struct BenchCmdOptions {
  std::string problem;  // gp | tsp
  std::string sizes;
  std::uint64_t seed = 0;
  int runs = 3;
  double min_duration = 0.05;
  std::string out;  // .jsonl for line-delimited records, CSV otherwise
};

inline int cmd_bench(const BenchCmdOptions& o, std::ostream& out) {
  BenchProblem p;
  if (o.problem == "gp") {
    p = BenchProblem::GraphPartition;
  } else if (o.problem == "tsp") {
    p = BenchProblem::Tsp;
  } else {
    throw Error(ErrorCode::InvalidArgument, "bench problem must be gp or tsp");
  }
  const ScalingResult r =
      run_scaling(p, parse_int_list<std::size_t>(o.sizes, "size"), o.seed, {o.min_duration, o.runs});
  const std::string csv = to_csv(r.records);
  if (!o.out.empty()) {
    const bool jsonl = o.out.size() >= 6 && o.out.ends_with(".jsonl");
    write_output(jsonl ? to_jsonl(r.records) : csv, o.out, out);
  }
  out << csv;
  auto slope = [](const std::optional<double>& s) {
    return s ? detail::format_real(std::round(*s * 1000.0) / 1000.0) : std::string("n/a");
  };
  out << "expression_time slope: " << slope(r.expression_slope) << '\n'
      << "compile_time slope: " << slope(r.compile_slope) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// check

struct CheckOptions {
  std::string a;
  std::string b;
  double tol = 1e-9;
};

inline int cmd_check(const CheckOptions& o, std::ostream& out) {
  const bool same = qubo_equal(read_qubo_file(o.a).to_qubo_map(),
                               read_qubo_file(o.b).to_qubo_map(), o.tol);
  out << (same ? "equal" : "different") << '\n';
  return same ? kExitOk : kExitNegative;
}

}  // namespace quboc::cli
