// Split {4, 2, 7, 1} into two sets with equal sums using spins and annealing.

#include <cstdio>

#include "quboc/quboc.hpp"

using namespace quboc;

int main() {
  const Expr s1 = spin("s1"), s2 = spin("s2"), s3 = spin("s3"), s4 = spin("s4");
  const Expr h = pow(4.0 * s1 + 2.0 * s2 + 7.0 * s3 + s4, 2);
  const Model model = compile(h);

  SaParams params;
  params.seed = 7;
  const SampleSet ss = sa_sample(model.to_qubo(), params);
  const auto decoded = decode_sampleset(model, ss);
  const Sample best_sample = to_vartype(best(decoded).sample, Vartype::Spin);

  std::printf("energy %g\n", best(decoded).energy);
  for (const auto& [label, v] : best_sample.values) std::printf("  %s = %+d\n", label.c_str(), v);
  return 0;
}
