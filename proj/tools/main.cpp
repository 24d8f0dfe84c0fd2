// quboc: generate, solve, benchmark and compare QUBO files.

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using namespace quboc::cli;

void add_common_gen(CLI::App* sub, GenOptions& o) {
  sub->add_option("--feed", o.feed, "Placeholder values key=value (repeatable, comma-separated)");
  sub->add_option("--out,-o", o.out, "Output file (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compile, solve and benchmark QUBO models"};
  app.require_subcommand(1);

  GenOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Compile a built-in problem to a QUBO file");
  gen_cmd->require_subcommand(1);

  CLI::App* np = gen_cmd->add_subcommand("number-partition", "(sum n_i s_i)^2");
  np->add_option("numbers", gen.numbers, "Comma-separated positive integers")->required();
  add_common_gen(np, gen);

  CLI::App* ks = gen_cmd->add_subcommand("knapsack", "0/1 knapsack with an integer slack");
  ks->add_option("--weights", gen.weights, "Comma-separated item weights")->required();
  ks->add_option("--values", gen.values, "Comma-separated item values")->required();
  ks->add_option("--max-weight", gen.max_weight, "Weight limit")->required();
  ks->add_option("--encoding", gen.encoding, "Slack encoding")
      ->check(CLI::IsMember({"one-hot", "log"}));
  add_common_gen(ks, gen);

  CLI::App* gp = gen_cmd->add_subcommand("graph-partition", "Balanced min-cut on a random graph");
  gp->add_option("--nodes", gen.nodes, "Node count")->required();
  gp->add_option("--density", gen.density, "Edge probability");
  gp->add_option("--seed", gen.seed, "Graph seed");
  add_common_gen(gp, gen);

  CLI::App* tsp = gen_cmd->add_subcommand("tsp", "Travelling salesman with random distances");
  tsp->add_option("--cities", gen.cities, "City count")->required();
  tsp->add_option("--seed", gen.seed, "Distance seed");
  add_common_gen(tsp, gen);

  CLI::App* fac = gen_cmd->add_subcommand("factoring", "Multiplier circuit with a fixed product");
  fac->add_option("--product", gen.product, "Product in decimal")->required();
  fac->add_option("--bits", gen.bits, "Operand widths, e.g. 3,3")->required();
  add_common_gen(fac, gen);

  for (CLI::App* sub : {np, ks, gp, tsp, fac}) {
    sub->callback([&gen, sub] { gen.problem = sub->get_name(); });
  }

  SolveOptions solve;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve a QUBO file and report the best sample");
  solve_cmd->add_option("input", solve.input, "QUBO file")->required();
  solve_cmd->add_option("--method", solve.method, "exact, eliminate or sa")
      ->check(CLI::IsMember({"exact", "eliminate", "sa"}));
  solve_cmd->add_option("--max-vars", solve.max_vars, "Variable limit for exact");
  solve_cmd->add_option("--num-reads", solve.num_reads, "SA reads");
  solve_cmd->add_option("--sweeps", solve.sweeps, "SA sweeps per read");
  solve_cmd->add_option("--beta", solve.beta, "SA inverse temperature range MIN:MAX");
  solve_cmd->add_option("--seed", solve.seed, "SA seed");
  solve_cmd->add_option("--threads", solve.threads, "SA worker threads");
  solve_cmd->add_flag("!--no-normalize", solve.normalize, "Anneal the unscaled QUBO");
  solve_cmd->add_flag("--spin", solve.spin, "Print values as spins");

  BenchCmdOptions bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Time expression build and compile");
  bench_cmd->add_option("problem", bench.problem, "gp or tsp")
      ->required()
      ->check(CLI::IsMember({"gp", "tsp"}));
  bench_cmd->add_option("--sizes", bench.sizes, "Ascending comma-separated sizes")->required();
  bench_cmd->add_option("--seed", bench.seed, "Instance seed");
  bench_cmd->add_option("--runs", bench.runs, "Repetitions per timing (median)");
  bench_cmd->add_option("--min-time", bench.min_duration, "Minimum seconds per timing");
  bench_cmd->add_option("--out,-o", bench.out, "Record file (.jsonl or CSV)");

  CheckOptions check;
  CLI::App* check_cmd = app.add_subcommand("check", "Compare two QUBO files");
  check_cmd->add_option("a", check.a, "First file")->required();
  check_cmd->add_option("b", check.b, "Second file")->required();
  check_cmd->add_option("--tol", check.tol, "Absolute tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen, std::cout);
    if (solve_cmd->parsed()) return cmd_solve(solve, std::cout);
    if (bench_cmd->parsed()) return cmd_bench(bench, std::cout);
    if (check_cmd->parsed()) return cmd_check(check, std::cout);
  } catch (const quboc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
