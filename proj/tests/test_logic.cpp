#include <gtest/gtest.h>

#include <functional>
#include <set>
#include <tuple>

#include "oracles.hpp"
#include "quboc/quboc.hpp"

using namespace quboc;

namespace {

const Expr a = binary("a");
const Expr b = binary("b");
const Expr c = binary("c");

/// Minimum of the model energy over its variables outside `fixed`, for every
/// assignment of `fixed`.
std::map<std::vector<int>, double> min_over_rest(const Model& m,
                                                 const std::vector<std::string>& fixed) {
  std::map<std::vector<int>, double> out;
  const std::vector<std::string> vars = m.sorted_labels();
  oracle::for_each_assignment(vars.size(), [&](const std::vector<int>& x) {
    Assignment s;
    for (std::size_t i = 0; i < vars.size(); ++i) s[vars[i]] = x[i];
    std::vector<int> key;
    for (const auto& f : fixed) key.push_back(s.at(f));
    const double e = m.energy(s);
    auto [it, inserted] = out.try_emplace(key, e);
    if (!inserted) it->second = std::min(it->second, e);
  });
  return out;
}

void expect_gate_penalty(const Expr& penalty, const std::vector<std::string>& operands,
                         const std::function<int(const std::vector<int>&)>& truth) {
  const Model m = compile(penalty);
  for (const auto& [key, e] : min_over_rest(m, operands)) {
    std::vector<int> inputs(key.begin(), key.end() - 1);
    if (key.back() == truth(inputs)) {
      EXPECT_NEAR(e, 0.0, 1e-12);
    } else {
      EXPECT_GE(e, 1.0 - 1e-12);
    }
  }
}

}  // namespace

TEST(Gates, TruthTables) {
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const Assignment s{{"a", x}, {"b", y}};
      auto value = [&s](const Expr& g) { return compile(g).energy(s); };
      EXPECT_DOUBLE_EQ(value(gate_and(a, b)), x & y);
      EXPECT_DOUBLE_EQ(value(gate_or(a, b)), x | y);
      EXPECT_DOUBLE_EQ(value(gate_xor(a, b)), x ^ y);
      EXPECT_DOUBLE_EQ(compile(gate_not(a) + 0.0 * b).energy(s), 1 - x);
    }
  }
}

TEST(Gates, DoubleNegation) {
  EXPECT_EQ(compile(gate_not(gate_not(a))).to_qubo(), compile(a).to_qubo());
}

TEST(LogicConstraints, OrEnergies) {
  const Model m = compile(or_const(a, b, c, "or"));
  EXPECT_EQ(m.energy({{"a", 1}, {"b", 0}, {"c", 1}}), 0.0);
  EXPECT_EQ(m.energy({{"a", 0}, {"b", 1}, {"c", 0}}), 1.0);
}

TEST(LogicConstraints, PenaltiesMatchTruthTables) {
  expect_gate_penalty(not_const(a, c, "n"), {"a", "c"}, [](auto& v) { return 1 - v[0]; });
  expect_gate_penalty(and_const(a, b, c, "and"), {"a", "b", "c"},
                      [](auto& v) { return v[0] & v[1]; });
  expect_gate_penalty(or_const(a, b, c, "or"), {"a", "b", "c"}, [](auto& v) { return v[0] | v[1]; });
  expect_gate_penalty(xor_const(a, b, c, "xor"), {"a", "b", "c"},
                      [](auto& v) { return v[0] ^ v[1]; });
}

TEST(LogicConstraints, XorAncillaIsLabelled) {
  const Model m = compile(xor_const(a, b, c, "x"));
  EXPECT_TRUE(m.variables().contains("x_aux"));
  EXPECT_EQ(m.polynomial().degree(), 2U);
}

TEST(Adders, HalfAdderGroundStates) {
  const Model m = compile(half_adder_const(a, b, binary("s"), c, "ha"));
  const SampleSet ss = exact_solve(m.to_qubo());
  std::set<std::tuple<int, int, int, int>> rows;
  for (std::size_t i = 0; i < ss.size() && ss.energy(i) == 0.0; ++i) {
    const Sample s = ss.sample(i);
    rows.emplace(s["a"], s["b"], s["s"], s["c"]);
  }
  const std::set<std::tuple<int, int, int, int>> expected{
      {0, 0, 0, 0}, {0, 1, 1, 0}, {1, 0, 1, 0}, {1, 1, 0, 1}};
  EXPECT_EQ(rows, expected);
  EXPECT_EQ(ss.energy(0), 0.0);
  const Assignment wrong{{"a", 0}, {"b", 1}, {"s", 1}, {"c", 1}, {"ha_xor_aux", 0}};
  EXPECT_EQ(m.energy(wrong), 1.0);
}

TEST(Adders, HalfAdderExhaustive) {
  const Model m = compile(half_adder_const(a, b, binary("s"), c, "ha"));
  for (const auto& [key, e] : min_over_rest(m, {"a", "b", "s", "c"})) {
    const bool ok = key[2] == (key[0] ^ key[1]) && key[3] == (key[0] & key[1]);
    if (ok) {
      EXPECT_EQ(e, 0.0);
    } else {
      EXPECT_GE(e, 1.0);
    }
  }
}

TEST(Adders, FullAdderExhaustive) {
  const Model m = compile(full_adder_const(a, b, binary("cin"), binary("s"), binary("cout"), "fa"));
  EXPECT_TRUE(m.variables().contains("fa_w0"));
  EXPECT_TRUE(m.variables().contains("fa_w1"));
  EXPECT_TRUE(m.variables().contains("fa_w2"));
  for (const auto& [key, e] : min_over_rest(m, {"a", "b", "cin", "s", "cout"})) {
    const int total = key[0] + key[1] + key[2];
    const bool ok = key[3] == (total & 1) && key[4] == (total >> 1);
    if (ok) {
      EXPECT_EQ(e, 0.0);
    } else {
      EXPECT_GE(e, 1.0);
    }
  }
}

TEST(Adders, BundleEnergyIsSumOfMembers) {
  const Model m = compile(full_adder_const(a, b, binary("cin"), binary("s"), binary("cout"), "fa"));
  const std::vector<std::string> vars = m.sorted_labels();
  oracle::for_each_assignment(vars.size(), [&](const std::vector<int>& x) {
    Assignment s;
    for (std::size_t i = 0; i < vars.size(); ++i) s[vars[i]] = x[i];
    const DecodedSample d = decode_sample(m, {s, Vartype::Binary});
    double members = 0.0;
    for (const auto& [label, st] : d.constraints) members += st.energy;
    EXPECT_NEAR(d.energy, members, 1e-12);
  });
}

TEST(Multiplier, TwoByTwoAllProducts) {
  const VariableArray x = array_create("a", {2});
  const VariableArray y = array_create("b", {2});
  const VariableArray p = array_create("p", {4});
  const Model m = compile(multiplier_const(x.elements(), y.elements(), p.elements(), "m"));
  const GroundStates g = ground_states(m.to_qubo());
  EXPECT_EQ(g.energy, 0.0);
  std::set<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>> seen;
  for (std::size_t i = 0; i < g.states.size(); ++i) {
    const Sample s = g.states.sample(i);
    const auto av = decode_bits(s.values, "a", 2);
    const auto bv = decode_bits(s.values, "b", 2);
    const auto pv = decode_bits(s.values, "p", 4);
    EXPECT_EQ(av * bv, pv);
    seen.emplace(av, bv, pv);
  }
  EXPECT_EQ(seen.size(), 16U);
}

TEST(Multiplier, UpToThreeBitsByEnumeration) {
  for (std::size_t j = 1; j <= 3; ++j) {
    for (std::size_t k = 1; k <= 3; ++k) {
      for (std::uint64_t av = 0; av < (1U << j); ++av) {
        for (std::uint64_t bv = 0; bv < (1U << k); ++bv) {
          // Fix the operands and let the product float: the ground state must
          // decode to the true product at energy 0.
          const VariableArray p = array_create("p", {j + k});
          std::vector<Expr> ae, be;
          for (std::size_t i = 0; i < j; ++i) ae.emplace_back(static_cast<double>((av >> i) & 1U));
          for (std::size_t i = 0; i < k; ++i) be.emplace_back(static_cast<double>((bv >> i) & 1U));
          const Model m = compile(multiplier_const(ae, be, p.elements(), "m"));
          const GroundStates g = ground_states(m.to_qubo());
          ASSERT_EQ(g.energy, 0.0);
          for (std::size_t i = 0; i < g.states.size(); ++i) {
            const Sample s = g.states.sample(i);
            Assignment full = s.values;
            for (std::size_t bit = 0; bit < j + k; ++bit) {
              full.try_emplace("p[" + std::to_string(bit) + "]", 0);  // cancelled bits
            }
            EXPECT_EQ(decode_bits(full, "p", j + k), av * bv) << j << "x" << k;
          }
        }
      }
    }
  }
}

TEST(Multiplier, ThreeByThreeStructure) {
  const VariableArray x = array_create("a", {3});
  const VariableArray y = array_create("b", {3});
  const VariableArray p = array_create("p", {6});
  const Model m = compile(multiplier_const(x.elements(), y.elements(), p.elements(), "m"));
  std::size_t ands = 0, has = 0, fas = 0;
  for (const auto& [label, poly] : m.constraints()) {
    if (label.starts_with("m_and")) ++ands;
    if (label.starts_with("m_ha") && label.ends_with("_and")) ++has;
    if (label.starts_with("m_fa") && label.ends_with("_or")) ++fas;
  }
  EXPECT_EQ(ands, 9U);
  EXPECT_EQ(has, 3U);
  EXPECT_EQ(fas, 3U);
}

TEST(Multiplier, PrimeOutOfRangeHasPositiveMinimum) {
  const FactoringProblem f = factoring_problem(11, 2, 2);
  const GroundStates g = ground_states(compile(f.hamiltonian).to_qubo());
  EXPECT_GT(g.energy, 0.5);
}

TEST(Multiplier, SizeMismatch) {
  const VariableArray x = array_create("a", {2});
  const VariableArray p = array_create("p", {3});
  EXPECT_THROW(multiplier_const(x.elements(), x.elements(), p.elements(), "m"), Error);
  EXPECT_THROW(factoring_problem(64, 3, 3), Error);
  EXPECT_THROW(factoring_problem(6, 0, 3), Error);
}

TEST(Factoring, FifteenAndTwelve) {
  auto factor_pairs = [](std::uint64_t product) {
    const FactoringProblem f = factoring_problem(product, 3, 3);
    const GroundStates g = ground_states(compile(f.hamiltonian).to_qubo());
    EXPECT_EQ(g.energy, 0.0);
    EXPECT_FALSE(g.truncated);
    std::set<std::pair<std::uint64_t, std::uint64_t>> out;
    for (std::size_t i = 0; i < g.states.size(); ++i) {
      const Sample s = g.states.sample(i);
      out.emplace(decode_bits(s.values, "a", 3), decode_bits(s.values, "b", 3));
    }
    return out;
  };
  EXPECT_EQ(factor_pairs(15), (std::set<std::pair<std::uint64_t, std::uint64_t>>{{3, 5}, {5, 3}}));
  EXPECT_EQ(factor_pairs(12), (std::set<std::pair<std::uint64_t, std::uint64_t>>{
                                  {2, 6}, {3, 4}, {4, 3}, {6, 2}}));
}
