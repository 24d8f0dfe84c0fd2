#pragma once

// Desk-scale solvers for emitted QUBOs and decoding of their samples against
// a compiled model.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "quboc/error.hpp"
#include "quboc/model.hpp"

namespace quboc {

struct Sample {
  Assignment values;
  Vartype vartype = Vartype::Binary;

  int operator[](const std::string& label) const {
    auto it = values.find(label);
    if (it == values.end()) throw Error(ErrorCode::MissingVariable, "sample lacks '" + label + "'");
    return it->second;
  }
};

/// Same assignment viewed in another vartype (s = 2x - 1).
inline Sample to_vartype(const Sample& s, Vartype target) {
  if (s.vartype == target) return s;
  Sample out{{}, target};
  for (const auto& [l, v] : s.values) {
    out.values.emplace(l, target == Vartype::Spin ? 2 * v - 1 : (v + 1) / 2);
  }
  return out;
}

/// Samples over a shared variable list, stored row-major.
class SampleSet {
 public:
  explicit SampleSet(std::vector<std::string> variables, Vartype vartype = Vartype::Binary)
      : variables_(std::move(variables)), vartype_(vartype) {}

  void add(std::span<const std::int8_t> values, double energy, std::size_t occurrences = 1) {
    if (values.size() != variables_.size()) {
      throw Error(ErrorCode::InvalidArgument, "sample width does not match the variable list");
    }
    values_.insert(values_.end(), values.begin(), values.end());
    energies_.push_back(energy);
    occurrences_.push_back(occurrences);
  }

  std::size_t size() const noexcept { return energies_.size(); }
  bool empty() const noexcept { return energies_.empty(); }
  const std::vector<std::string>& variables() const noexcept { return variables_; }
  Vartype vartype() const noexcept { return vartype_; }

  std::span<const std::int8_t> values(std::size_t i) const {
    return {values_.data() + i * variables_.size(), variables_.size()};
  }
  double energy(std::size_t i) const { return energies_.at(i); }
  std::size_t occurrences(std::size_t i) const { return occurrences_.at(i); }

  Sample sample(std::size_t i) const {
    Sample s{{}, vartype_};
    auto v = values(i);
    for (std::size_t k = 0; k < variables_.size(); ++k) s.values.emplace(variables_[k], v[k]);
    return s;
  }

  /// Index of the lowest-energy record (first one on ties).
  std::size_t lowest() const {
    if (empty()) throw Error(ErrorCode::InvalidArgument, "empty sample set");
    return static_cast<std::size_t>(
        std::min_element(energies_.begin(), energies_.end()) - energies_.begin());
  }

  /// Orders records by energy, then lexicographically by assignment.
  void sort() {
    std::vector<std::size_t> order(size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
      if (energies_[a] != energies_[b]) return energies_[a] < energies_[b];
      auto va = values(a);
      auto vb = values(b);
      return std::lexicographical_compare(va.begin(), va.end(), vb.begin(), vb.end());
    });
    SampleSet sorted(variables_, vartype_);
    for (std::size_t i : order) sorted.add(values(i), energies_[i], occurrences_[i]);
    *this = std::move(sorted);
  }

 private:
  std::vector<std::string> variables_;
  Vartype vartype_;
  std::vector<std::int8_t> values_;
  std::vector<double> energies_;
  std::vector<std::size_t> occurrences_;
};

namespace detail {

/// Index-based view of a QUBO map: variables in label order, linear terms,
/// symmetric adjacency lists.
struct SparseQubo {
  std::vector<std::string> variables;
  std::vector<double> linear;
  std::vector<std::vector<std::pair<std::size_t, double>>> neighbors;
  std::vector<std::tuple<std::size_t, std::size_t, double>> couplings;  // i < j
  double offset = 0.0;

  explicit SparseQubo(const QuboMap& q) : variables(q.variables()), offset(q.offset) {
    std::unordered_map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < variables.size(); ++i) pos.emplace(variables[i], i);
    linear.assign(variables.size(), 0.0);
    neighbors.resize(variables.size());
    std::map<std::pair<std::size_t, std::size_t>, double> pairs;
    for (const auto& [key, v] : q.entries) {
      const std::size_t i = pos.at(key.first);
      const std::size_t j = pos.at(key.second);
      if (i == j) {
        linear[i] += v;
      } else {
        pairs[{std::min(i, j), std::max(i, j)}] += v;
      }
    }
    for (const auto& [ij, v] : pairs) {
      if (v == 0.0) continue;
      couplings.emplace_back(ij.first, ij.second, v);
      neighbors[ij.first].emplace_back(ij.second, v);
      neighbors[ij.second].emplace_back(ij.first, v);
    }
  }

  std::size_t size() const noexcept { return variables.size(); }

  double energy(std::span<const std::int8_t> x) const {
    double e = offset;
    for (std::size_t i = 0; i < linear.size(); ++i) {
      if (x[i]) e += linear[i];
    }
    for (const auto& [i, j, v] : couplings) {
      if (x[i] && x[j]) e += v;
    }
    return e;
  }
};

// Portable generator helpers: the standard distributions are not specified
// bit-for-bit across library implementations.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t uniform_below(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return static_cast<std::size_t>(r % n);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exhaustive enumeration

struct ExactOptions {
  std::size_t max_variables = 24;
  /// Keep only the `keep` lowest-energy assignments (all by default).
  std::size_t keep = std::numeric_limits<std::size_t>::max();
};

/// Every assignment with its energy, ascending by energy and then by
/// assignment. Enumerates in Gray-code order so each step costs one flip.
inline SampleSet exact_solve(const QuboMap& q, const ExactOptions& opts = {}) {
  const detail::SparseQubo qubo(q);
  const std::size_t n = qubo.size();
  if (n > opts.max_variables) {
    throw Error(ErrorCode::LimitExceeded, std::to_string(n) + " variables exceed the exact limit of " +
                                              std::to_string(opts.max_variables));
  }
  const std::uint64_t total = std::uint64_t{1} << n;
  const std::size_t keep = static_cast<std::size_t>(std::min<std::uint64_t>(opts.keep, total));

  using Candidate = std::pair<double, std::vector<std::int8_t>>;
  std::priority_queue<Candidate> worst_first;  // max-heap on (energy, assignment)

  std::vector<std::int8_t> x(n, 0);
  std::vector<double> field = qubo.linear;
  double e = qubo.offset;
  auto offer = [&]() {
    if (worst_first.size() < keep) {
      worst_first.emplace(e, x);
    } else if (const auto& top = worst_first.top();
               e < top.first || (e == top.first && x < top.second)) {
      worst_first.pop();
      worst_first.emplace(e, x);
    }
  };
  offer();
  for (std::uint64_t k = 1; k < total; ++k) {
    const std::size_t i = static_cast<std::size_t>(std::countr_zero(k));
    const double sign = x[i] ? -1.0 : 1.0;
    e += sign * field[i];
    x[i] ^= 1;
    for (const auto& [j, b] : qubo.neighbors[i]) field[j] += sign * b;
    offer();
  }

  SampleSet out(qubo.variables);
  while (!worst_first.empty()) {
    const auto& [energy, values] = worst_first.top();
    out.add(values, qubo.energy(values));  // recomputed without path round-off
    worst_first.pop();
  }
  out.sort();
  return out;
}

inline SampleSet exact_solve(const Model& m, const PlaceholderValues& feed = {},
                             const ExactOptions& opts = {}) {
  return exact_solve(m.to_qubo(feed), opts);
}

// ---------------------------------------------------------------------------
// Exact minimisation by variable elimination

struct EliminationOptions {
  /// Largest elimination width allowed; tables hold 2^(width + 1) entries.
  std::size_t max_width = 22;
  /// Cap on enumerated ground states.
  std::size_t max_states = 4096;
  /// Ties within this absolute tolerance count as optimal.
  double tolerance = 1e-9;
};

struct GroundStates {
  double energy = 0.0;
  SampleSet states{{}};
  std::size_t width = 0;
  bool truncated = false;
};

/// Minimum energy and every minimising assignment, computed by min-sum
/// bucket elimination along a greedy min-degree order. Exact, and tractable
/// whenever the interaction graph has small elimination width regardless of
/// the variable count.
inline GroundStates ground_states(const QuboMap& q, const EliminationOptions& opts = {}) {
  const detail::SparseQubo qubo(q);
  const std::size_t n = qubo.size();

  struct Factor {
    std::vector<std::size_t> scope;  // sorted
    std::vector<double> table;       // bit t of the index <-> scope[t]
  };
  struct Bucket {
    std::size_t var;
    std::vector<std::size_t> context;  // sorted, excludes var
    std::vector<double> table;         // bit 0 <-> var, bit t+1 <-> context[t]
  };

  std::vector<Factor> pool;
  for (std::size_t i = 0; i < n; ++i) pool.push_back({{i}, {0.0, qubo.linear[i]}});
  for (const auto& [i, j, b] : qubo.couplings) pool.push_back({{i, j}, {0.0, 0.0, 0.0, b}});

  // Greedy min-degree order on the interaction graph.
  std::vector<std::set<std::size_t>> adj(n);
  for (const auto& [i, j, b] : qubo.couplings) {
    adj[i].insert(j);
    adj[j].insert(i);
  }
  std::vector<bool> gone(n, false);
  std::vector<std::size_t> order;
  GroundStates result;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (!gone[v] && (best == n || adj[v].size() < adj[best].size())) best = v;
    }
    result.width = std::max(result.width, adj[best].size());
    if (result.width > opts.max_width) {
      throw Error(ErrorCode::LimitExceeded,
                  "elimination width exceeds " + std::to_string(opts.max_width));
    }
    for (std::size_t a : adj[best]) {
      for (std::size_t b : adj[best]) {
        if (a != b) adj[a].insert(b);
      }
      adj[a].erase(best);
    }
    adj[best].clear();
    gone[best] = true;
    order.push_back(best);
  }

  auto lookup = [](const Factor& f, const std::vector<std::int8_t>& x) {
    std::size_t idx = 0;
    for (std::size_t t = 0; t < f.scope.size(); ++t) {
      if (x[f.scope[t]]) idx |= std::size_t{1} << t;
    }
    return f.table[idx];
  };

  std::vector<Bucket> buckets;
  std::vector<std::int8_t> x(n, 0);
  for (std::size_t v : order) {
    std::vector<Factor> mine;
    std::vector<Factor> rest;
    for (auto& f : pool) {
      (std::binary_search(f.scope.begin(), f.scope.end(), v) ? mine : rest).push_back(std::move(f));
    }
    pool = std::move(rest);
    std::vector<std::size_t> context;
    for (const auto& f : mine) {
      for (std::size_t u : f.scope) {
        if (u != v) context.push_back(u);
      }
    }
    std::sort(context.begin(), context.end());
    context.erase(std::unique(context.begin(), context.end()), context.end());

    Bucket bucket{v, context, std::vector<double>(std::size_t{2} << context.size(), 0.0)};
    Factor message{context, std::vector<double>(std::size_t{1} << context.size(), 0.0)};
    for (std::size_t c = 0; c < message.table.size(); ++c) {
      for (std::size_t t = 0; t < context.size(); ++t) x[context[t]] = (c >> t) & 1U;
      double lo = std::numeric_limits<double>::infinity();
      for (int val = 0; val < 2; ++val) {
        x[v] = static_cast<std::int8_t>(val);
        double s = 0.0;
        for (const auto& f : mine) s += lookup(f, x);
        bucket.table[(c << 1) | static_cast<std::size_t>(val)] = s;
        lo = std::min(lo, s);
      }
      message.table[c] = lo;
    }
    x.assign(n, 0);
    buckets.push_back(std::move(bucket));
    pool.push_back(std::move(message));
  }
  double minimum = qubo.offset;
  for (const auto& f : pool) minimum += f.table[0];  // only empty scopes remain
  result.energy = minimum;

  // Walk the buckets backwards, branching on every optimal value.
  result.states = SampleSet(qubo.variables);
  std::vector<std::int8_t> assign(n, 0);
  auto options_at = [&](std::size_t pos) {
    const Bucket& b = buckets[pos];
    std::size_t c = 0;
    for (std::size_t t = 0; t < b.context.size(); ++t) {
      if (assign[b.context[t]]) c |= std::size_t{1} << t;
    }
    const double v0 = b.table[c << 1];
    const double v1 = b.table[(c << 1) | 1U];
    const double lo = std::min(v0, v1);
    return std::pair<bool, bool>{v0 <= lo + opts.tolerance, v1 <= lo + opts.tolerance};
  };
  std::vector<std::pair<bool, bool>> choices(buckets.size());
  const std::size_t m = buckets.size();
  if (m == 0) {
    result.states.add({}, minimum);
    return result;
  }
  // Depth-first over bucket positions m-1 .. 0; next[pos] is the next value to try.
  std::vector<int> next(m, 0);
  std::size_t pos = m - 1;
  choices[pos] = options_at(pos);
  next[pos] = 0;
  for (;;) {
    int val = -1;
    while (next[pos] < 2) {
      const int cand = next[pos]++;
      if (cand == 0 ? choices[pos].first : choices[pos].second) {
        val = cand;
        break;
      }
    }
    if (val < 0) {
      if (pos == m - 1) break;
      ++pos;
      continue;
    }
    assign[buckets[pos].var] = static_cast<std::int8_t>(val);
    if (pos == 0) {
      if (result.states.size() >= opts.max_states) {
        result.truncated = true;
        break;
      }
      result.states.add(assign, qubo.energy(assign));
      continue;
    }
    --pos;
    choices[pos] = options_at(pos);
    next[pos] = 0;
  }
  result.states.sort();
  return result;
}

// ---------------------------------------------------------------------------
// Simulated annealing

struct SaParams {
  std::size_t num_reads = 10;
  std::size_t sweeps = 1000;
  double beta_min = 1.0;
  double beta_max = 50.0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Single-flip Metropolis annealing. The inverse temperature follows a
/// geometric schedule from beta_min to beta_max over `sweeps` passes, each pass
/// visiting the variables in a fresh random order. Read r draws from its own
/// stream seeded with (seed, r), so results do not depend on `threads`.
/// Records are returned in read order.
inline SampleSet sa_sample(const QuboMap& q, const SaParams& params = {}) {
  if (params.num_reads == 0) throw Error(ErrorCode::InvalidArgument, "num_reads must be >= 1");
  if (params.sweeps == 0) throw Error(ErrorCode::InvalidArgument, "sweeps must be >= 1");
  if (!(params.beta_min > 0.0) || !(params.beta_max > params.beta_min)) {
    throw Error(ErrorCode::InvalidArgument, "beta range must satisfy 0 < beta_min < beta_max");
  }
  const detail::SparseQubo qubo(q);
  const std::size_t n = qubo.size();

  std::vector<double> betas(params.sweeps);
  for (std::size_t s = 0; s < params.sweeps; ++s) {
    const double t = params.sweeps == 1 ? 0.0 : static_cast<double>(s) / (params.sweeps - 1);
    betas[s] = params.beta_min * std::pow(params.beta_max / params.beta_min, t);
  }

  std::vector<std::int8_t> states(params.num_reads * n, 0);
  std::vector<double> energies(params.num_reads, 0.0);

  auto run_read = [&](std::size_t read) {
    std::seed_seq seq{static_cast<std::uint32_t>(params.seed),
                      static_cast<std::uint32_t>(params.seed >> 32),
                      static_cast<std::uint32_t>(read)};
    std::mt19937_64 rng(seq);
    std::span<std::int8_t> x(states.data() + read * n, n);
    for (auto& v : x) v = static_cast<std::int8_t>(rng() >> 63);
    std::vector<double> field = qubo.linear;
    for (const auto& [i, j, b] : qubo.couplings) {
      if (x[j]) field[i] += b;
      if (x[i]) field[j] += b;
    }
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (double beta : betas) {
      for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[detail::uniform_below(rng, i)]);
      for (std::size_t i : perm) {
        const double delta = x[i] ? -field[i] : field[i];
        if (delta > 0.0 && detail::uniform01(rng) >= std::exp(-beta * delta)) continue;
        const double sign = x[i] ? -1.0 : 1.0;
        x[i] ^= 1;
        for (const auto& [j, b] : qubo.neighbors[i]) field[j] += sign * b;
      }
    }
    energies[read] = qubo.energy(x);
  };

  const unsigned threads = std::max(1U, std::min<unsigned>(params.threads,
                                                          static_cast<unsigned>(params.num_reads)));
  if (threads == 1) {
    for (std::size_t r = 0; r < params.num_reads; ++r) run_read(r);
  } else {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        for (std::size_t r = t; r < params.num_reads; r += threads) run_read(r);
      });
    }
  }

  SampleSet out(qubo.variables);
  for (std::size_t r = 0; r < params.num_reads; ++r) {
    out.add(std::span<const std::int8_t>(states.data() + r * n, n), energies[r]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Decoding

/// A constraint counts as satisfied when |penalty| <= this.
inline constexpr double kSatisfiedTolerance = 1e-9;

struct ConstraintStatus {
  bool satisfied = true;
  double energy = 0.0;

  friend bool operator==(const ConstraintStatus&, const ConstraintStatus&) = default;
};

using ConstraintReport = std::map<std::string, ConstraintStatus>;

struct DecodedSample {
  Sample sample;
  double energy = 0.0;
  ConstraintReport constraints;

  int operator[](const std::string& label) const { return sample[label]; }
};

inline ConstraintReport broken_constraints(const DecodedSample& d) {
  ConstraintReport out;
  for (const auto& [label, status] : d.constraints) {
    if (!status.satisfied) out.emplace(label, status);
  }
  return out;
}

/// Energy and per-constraint report of `sample` under `m`. Auxiliary
/// variables must be present; their AND penalties appear in the report.
inline DecodedSample decode_sample(const Model& m, const Sample& sample,
                                   const PlaceholderValues& feed = {}) {
  const std::vector<std::int8_t> x = m.binary_assignment(sample.values, sample.vartype);
  const std::vector<double> ph = m.resolve(feed);
  const std::span<const std::int8_t> view(x);
  DecodedSample d{sample, m.polynomial().evaluate(view, ph), {}};
  for (const auto& [label, poly] : m.constraints()) {
    const double e = poly.evaluate(view, ph);
    d.constraints.emplace(label, ConstraintStatus{std::abs(e) <= kSatisfiedTolerance, e});
  }
  return d;
}

inline std::vector<DecodedSample> decode_sampleset(const Model& m, const SampleSet& ss,
                                                   const PlaceholderValues& feed = {}) {
  std::vector<DecodedSample> out;
  out.reserve(ss.size());
  for (std::size_t i = 0; i < ss.size(); ++i) out.push_back(decode_sample(m, ss.sample(i), feed));
  return out;
}

/// Lowest-energy decoded sample (first on ties).
inline const DecodedSample& best(const std::vector<DecodedSample>& samples) {
  if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "no samples");
  return *std::min_element(samples.begin(), samples.end(),
                           [](const auto& a, const auto& b) { return a.energy < b.energy; });
}

}  // namespace quboc
