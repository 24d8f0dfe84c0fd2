// Knapsack with a one-hot weight slack: sweep the two penalty weights, anneal
// each normalised QUBO and keep the best feasible answer.

#include <cstdio>
#include <optional>

#include "quboc/quboc.hpp"

using namespace quboc;

int main() {
  const KnapsackProblem k = knapsack({1, 3, 7, 9}, {10, 2, 3, 6}, 10, SlackEncoding::OneHot);
  const Model model = compile(k.hamiltonian);  // compiled once, re-fed below

  std::optional<DecodedSample> best_feasible;
  for (int lmd1 = 1; lmd1 < 10; ++lmd1) {
    for (int lmd2 = 1; lmd2 < 10; ++lmd2) {
      const PlaceholderValues feed{{"lmd1", lmd1}, {"lmd2", lmd2}};
      SaParams params;
      params.seed = static_cast<std::uint64_t>(10 * lmd1 + lmd2);
      const SampleSet ss = sa_sample(normalize(model.to_qubo(feed)), params);
      const auto decoded = decode_sampleset(model, ss, feed);
      const DecodedSample& b = best(decoded);
      if (broken_constraints(b).empty() && (!best_feasible || b.energy < best_feasible->energy)) {
        best_feasible = b;
      }
    }
  }
  if (!best_feasible) {
    std::puts("no feasible sample");
    return 1;
  }
  std::printf("selection = [");
  for (std::size_t i = 0; i < k.items.size(); ++i) {
    std::printf("%s%d", i ? ", " : "", (*best_feasible)["item[" + std::to_string(i) + "]"]);
  }
  std::printf("]\nsum of the values = %g\n", -best_feasible->energy);
  return 0;
}
