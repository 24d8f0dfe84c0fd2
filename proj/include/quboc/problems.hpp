#pragma once

// Hamiltonians for the built-in problem families.

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "quboc/encodings.hpp"
#include "quboc/error.hpp"
#include "quboc/expr.hpp"
#include "quboc/model.hpp"
#include "quboc/solve.hpp"

namespace quboc {

/// (sum n_i s_i)^2 over spins "s1", "s2", ...
inline Expr number_partition(const std::vector<long long>& numbers) {
  if (numbers.empty()) throw Error(ErrorCode::InvalidArgument, "number set is empty");
  Expr total(0.0);
  for (std::size_t i = 0; i < numbers.size(); ++i) {
    if (numbers[i] <= 0) {
      throw Error(ErrorCode::InvalidArgument, "numbers must be positive integers");
    }
    Expr term = static_cast<double>(numbers[i]) * spin("s" + std::to_string(i + 1));
    total = i == 0 ? term : total + term;
  }
  return pow(total, 2);
}

enum class SlackEncoding { OneHot, Log };

struct KnapsackProblem {
  VariableArray items;
  EncodedInteger weight;
  Expr hamiltonian;
  /// Placeholders the model expects in its feed.
  std::vector<std::string> placeholders;
};

/// lmd2 * Constraint((W - sum w_i x_i)^2, "weight_constraint") - sum v_i x_i
/// with items "item[i]" and the packed weight W an encoded integer on
/// [1, max_weight]. The one-hot slack is weighted by placeholder "lmd1"; with
/// the log slack the only weight is "lmd".
inline KnapsackProblem knapsack(const std::vector<long long>& weights,
                                const std::vector<long long>& values, long long max_weight,
                                SlackEncoding encoding) {
  if (weights.empty() || weights.size() != values.size()) {
    throw Error(ErrorCode::InvalidArgument, "weights and values must be non-empty and equal length");
  }
  if (max_weight < 1) throw Error(ErrorCode::InvalidArgument, "max weight must be positive");
  const std::size_t n = weights.size();
  VariableArray items = array_create("item", {n});
  Expr packed_weight(0.0);
  Expr packed_value(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    packed_weight += static_cast<double>(weights[i]) * items[i];
    packed_value += static_cast<double>(values[i]) * items[i];
  }
  const bool one_hot = encoding == SlackEncoding::OneHot;
  EncodedInteger w = one_hot
                         ? one_hot_integer("weight_one_hot", {1, max_weight}, placeholder("lmd1"))
                         : log_integer("weight_log", {1, max_weight});
  Expr ha = constraint(pow(w - packed_weight, 2), "weight_constraint");
  Expr lmd = placeholder(one_hot ? "lmd2" : "lmd");
  Expr h = lmd * ha - packed_value;
  std::vector<std::string> ph = one_hot ? std::vector<std::string>{"lmd1", "lmd2"}
                                        : std::vector<std::string>{"lmd"};
  return {std::move(items), std::move(w), std::move(h), std::move(ph)};
}

struct GraphPartitionProblem {
  std::size_t nodes;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  Expr hamiltonian;
};

/// A (sum s_i)^2 + B sum_{(i,j) in E} (1 - s_i s_j) / 2 over spins "s[i]" on a
/// seeded binomial random graph. A and B are placeholders.
inline GraphPartitionProblem gen_graph_partition(std::size_t n, double density = 0.3,
                                                 std::uint64_t seed = 0) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "graph partition needs at least 2 nodes");
  if (!(density >= 0.0 && density <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "edge density must lie in [0, 1]");
  }
  std::mt19937_64 rng(seed);
  GraphPartitionProblem g{n, {}, Expr(0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (detail::uniform01(rng) < density) g.edges.emplace_back(i, j);
    }
  }
  VariableArray s = array_create("s", {n}, Vartype::Spin);
  Expr balance = s[0];
  for (std::size_t i = 1; i < n; ++i) balance += s[i];
  Expr cut(0.0);
  for (const auto& [i, j] : g.edges) cut += 0.5 - 0.5 * s[i] * s[j];
  g.hamiltonian = placeholder("A") * pow(balance, 2) + placeholder("B") * cut;
  return g;
}

inline PlaceholderValues graph_partition_feed() { return {{"A", 1.0}, {"B", 1.0}}; }

struct TspProblem {
  std::size_t cities;
  std::vector<std::vector<int>> distance;  // symmetric, zero diagonal
  Expr hamiltonian;
};

/// Tour cost sum_{u != v} d(u,v) sum_t x[u][t] x[v][t+1] (cyclic in t) plus
/// A-weighted one-hot constraints "city[v]" and "time[t]", over binaries
/// "c[v][t]" (city v visited at step t). Distances are uniform in [1, 10].
inline TspProblem gen_tsp(std::size_t n, std::uint64_t seed = 0) {
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "tsp needs at least 3 cities");
  std::mt19937_64 rng(seed);
  TspProblem t{n, std::vector<std::vector<int>>(n, std::vector<int>(n, 0)), Expr(0.0)};
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      t.distance[u][v] = t.distance[v][u] = 1 + static_cast<int>(detail::uniform_below(rng, 10));
    }
  }
  VariableArray x = array_create("c", {n, n});
  Expr cost(0.0);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (u == v) continue;
      for (std::size_t s = 0; s < n; ++s) {
        cost += static_cast<double>(t.distance[u][v]) * x.at({u, s}) * x.at({v, (s + 1) % n});
      }
    }
  }
  Expr a = placeholder("A");
  Expr penalty(0.0);
  for (std::size_t v = 0; v < n; ++v) {
    Expr row(-1.0);
    Expr col(-1.0);
    for (std::size_t s = 0; s < n; ++s) {
      row += x.at({v, s});
      col += x.at({s, v});
    }
    penalty += constraint(pow(row, 2), "city[" + std::to_string(v) + "]");
    penalty += constraint(pow(col, 2), "time[" + std::to_string(v) + "]");
  }
  t.hamiltonian = cost + a * penalty;
  return t;
}

/// A = n * max distance + 1: any single constraint violation costs more than
/// the largest possible tour.
inline PlaceholderValues tsp_feed(const TspProblem& t) {
  int dmax = 0;
  for (const auto& row : t.distance) {
    for (int d : row) dmax = std::max(dmax, d);
  }
  return {{"A", static_cast<double>(t.cities) * dmax + 1.0}};
}

}  // namespace quboc
