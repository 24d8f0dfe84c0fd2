// Factor 15 with a 3-bit x 3-bit multiplier circuit by exact minimisation.

#include <cstdio>

#include "quboc/quboc.hpp"

using namespace quboc;

int main() {
  const FactoringProblem f = factoring_problem(15, 3, 3);
  const Model model = compile(f.hamiltonian);
  std::printf("%zu variables (%zu auxiliary)\n", model.num_variables(), model.aux().size());

  const GroundStates g = ground_states(model.to_qubo());
  std::printf("minimum energy %g, %zu ground state(s)\n", g.energy, g.states.size());
  for (std::size_t i = 0; i < g.states.size(); ++i) {
    const Sample s = g.states.sample(i);
    std::printf("  %llu x %llu\n", static_cast<unsigned long long>(decode_bits(s.values, "a", 3)),
                static_cast<unsigned long long>(decode_bits(s.values, "b", 3)));
  }
  return 0;
}
