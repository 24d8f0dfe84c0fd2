#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "quboc/quboc.hpp"

using namespace quboc;

namespace {

Model ab_minus_one() { return compile(pow(binary("a") * binary("b") - 1.0, 2)); }

std::map<std::string, int> binary_of(const std::vector<std::string>& vars,
                                     const std::vector<int>& x) {
  std::map<std::string, int> a;
  for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = x[i];
  return a;
}

}  // namespace

TEST(ToQubo, SquaredProduct) {
  const Model m = ab_minus_one();
  EXPECT_EQ(m.num_variables(), 2U);
  EXPECT_EQ(m.polynomial().degree(), 2U);
  const QuboMap q = m.to_qubo();
  EXPECT_EQ(q.entries.size(), 3U);
  EXPECT_EQ(q.entries.at({"a", "b"}), -1.0);
  EXPECT_EQ(q.entries.at({"a", "a"}), 0.0);
  EXPECT_EQ(q.entries.at({"b", "b"}), 0.0);
  EXPECT_EQ(q.offset, 1.0);
}

TEST(ToQubo, SingleBinary) {
  const QuboMap q = compile(binary("a")).to_qubo();
  EXPECT_EQ(q.entries.size(), 1U);
  EXPECT_EQ(q.entries.at({"a", "a"}), 1.0);
  EXPECT_EQ(q.offset, 0.0);
}

TEST(ToQubo, ZeroDiagonalsCanBeSuppressed) {
  const QuboMap q = ab_minus_one().to_qubo({}, {.zero_diagonals = false});
  EXPECT_EQ(q.entries.size(), 1U);
}

TEST(ToQubo, IndexLabels) {
  const IndexedQuboMap q = ab_minus_one().to_qubo_indexed();
  EXPECT_EQ(q.entries.at({0, 1}), -1.0);
  EXPECT_EQ(q.entries.at({0, 0}), 0.0);
  EXPECT_EQ(q.offset, 1.0);
}

TEST(ToQubo, EmptyModel) {
  const Model m = compile(num(0.0));
  EXPECT_EQ(m.num_variables(), 0U);
  const QuboMap q = m.to_qubo();
  EXPECT_TRUE(q.entries.empty());
  EXPECT_EQ(q.offset, 0.0);
}

TEST(ToIsing, SquaredProduct) {
  const IsingMaps is = ab_minus_one().to_ising();
  EXPECT_EQ(is.linear.at("a"), -0.25);
  EXPECT_EQ(is.linear.at("b"), -0.25);
  EXPECT_EQ(is.quadratic.size(), 1U);
  EXPECT_EQ(is.quadratic.at({"a", "b"}), -0.25);
  EXPECT_EQ(is.offset, 0.75);
}

TEST(ToIsing, ConstantModel) {
  const IsingMaps is = compile(num(4.0)).to_ising();
  EXPECT_TRUE(is.linear.empty());
  EXPECT_TRUE(is.quadratic.empty());
  EXPECT_EQ(is.offset, 4.0);
}

TEST(ToMatrix, SquaredProduct) {
  const QuboMatrix q = ab_minus_one().to_matrix();
  ASSERT_EQ(q.size(), 2U);
  EXPECT_EQ(q(0, 0), 0.0);
  EXPECT_EQ(q(0, 1), -1.0);
  EXPECT_EQ(q(1, 0), 0.0);
  EXPECT_EQ(q(1, 1), 0.0);
  EXPECT_EQ(q.offset, 1.0);
}

TEST(ToMatrix, LinearModelIsDiagonal) {
  const QuboMatrix q = compile(2.0 * binary("a") - 3.0 * binary("b")).to_matrix();
  EXPECT_EQ(q(0, 0), 2.0);
  EXPECT_EQ(q(1, 1), -3.0);
  EXPECT_EQ(q(0, 1), 0.0);
}

TEST(ToMatrix, EnergyMatchesPolynomialOnRandomModels) {
  std::mt19937_64 rng(77);
  oracle::RandomSpec spec;
  spec.max_vars = 12;
  spec.max_terms = 20;
  spec.max_degree = 2;
  spec.spin_fraction = 0.3;
  for (int trial = 0; trial < 20; ++trial) {
    const oracle::TermList t = oracle::random_terms(rng, spec);
    const Model m = compile(t.to_expr());
    const QuboMatrix q = m.to_matrix();
    std::bernoulli_distribution bit(0.5);
    for (int k = 0; k < 100; ++k) {
      std::vector<int> x(t.labels.size());
      for (auto& v : x) v = bit(rng);
      std::vector<std::int8_t> xm(q.size());
      const auto a = t.assignment(x);
      for (std::size_t i = 0; i < q.size(); ++i) xm[i] = static_cast<std::int8_t>(a.at(q.variables[i]));
      EXPECT_NEAR(q.energy(std::span<const std::int8_t>(xm)), t.evaluate(x), 1e-9);
    }
  }
}

TEST(Ising, EnergyEquivalenceExhaustive) {
  std::mt19937_64 rng(101);
  oracle::RandomSpec spec;
  spec.max_vars = 6;
  spec.max_terms = 12;
  spec.max_degree = 2;
  spec.spin_fraction = 0.5;
  for (int trial = 0; trial < 30; ++trial) {
    const oracle::TermList t = oracle::random_terms(rng, spec);
    const Model m = compile(t.to_expr());
    const QuboMap q = m.to_qubo();
    const IsingMaps is = m.to_ising();
    oracle::for_each_assignment(t.labels.size(), [&](const std::vector<int>& x) {
      const auto a = t.assignment(x);
      std::map<std::string, int> s;
      for (const auto& [l, v] : a) s[l] = 2 * v - 1;
      const double expected = t.evaluate(x);
      EXPECT_NEAR(q.energy(a), expected, 1e-9);
      EXPECT_NEAR(is.energy(s), expected, 1e-9);
    });
  }
}

TEST(Quadratize, CubicProduct) {
  const Model m = compile(binary("x") * binary("y") * binary("z"));
  ASSERT_EQ(m.aux().size(), 1U);
  EXPECT_EQ(m.aux()[0].label, "x*y");
  EXPECT_EQ(m.num_variables(), 4U);
  const QuboMap q = m.to_qubo();
  QuboMap expected;
  expected.entries = {{{"x", "y"}, 5.0},      {{"x", "x*y"}, -10.0}, {{"x*y", "y"}, -10.0},
                      {{"x*y", "z"}, 1.0},    {{"x*y", "x*y"}, 15.0}, {{"x", "x"}, 0.0},
                      {{"y", "y"}, 0.0},      {{"z", "z"}, 0.0}};
  EXPECT_EQ(q, expected);
}

TEST(Quadratize, StrengthScalesPenalty) {
  const Model m = compile(binary("x") * binary("y") * binary("z"), Expr(2.0));
  const QuboMap q = m.to_qubo();
  EXPECT_EQ(q.entries.at({"x", "y"}), 2.0);
  EXPECT_EQ(q.entries.at({"x*y", "x*y"}), 6.0);
}

TEST(Quadratize, PlaceholderStrength) {
  const Model m = compile(binary("x") * binary("y") * binary("z"), placeholder("k"));
  EXPECT_EQ(m.to_qubo({{"k", 5.0}}), compile(binary("x") * binary("y") * binary("z")).to_qubo());
}

TEST(Quadratize, StrengthWithVariablesIsRejected) {
  EXPECT_THROW(compile(binary("x") * binary("y") * binary("z"), binary("w")), Error);
}

TEST(Quadratize, QuadraticInputUnchanged) {
  const Expansion ex = expand(binary("x") * binary("y") + binary("z"));
  SymbolTable vars = ex.variables;
  const Quadratization q = quadratize(ex.polynomial, Coefficient(5.0), vars);
  EXPECT_TRUE(q.aux.empty());
  EXPECT_EQ(q.polynomial, ex.polynomial);
}

TEST(Quadratize, AuxLabelCollisionIsRejected) {
  const Expr h = binary("x") * binary("y") * binary("z") + binary("x*y");
  try {
    compile(h);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LabelConflict);
  }
}

TEST(Quadratize, PicksMostFrequentPair) {
  // y,z occurs in three cubic terms, every other pair in at most two.
  const Expr w = binary("w"), x = binary("x"), y = binary("y"), z = binary("z");
  const Model m = compile(w * y * z + x * y * z + w * x * y * z);
  ASSERT_FALSE(m.aux().empty());
  EXPECT_EQ(m.aux()[0].label, "y*z");
}

TEST(Quadratize, MinimaPreservedOnRandomPolynomials) {
  std::mt19937_64 rng(31337);
  oracle::RandomSpec spec;
  spec.max_vars = 7;
  spec.max_terms = 8;
  spec.max_degree = 4;
  for (int trial = 0; trial < 60; ++trial) {
    const oracle::TermList t = oracle::random_terms(rng, spec);
    const double strength = 2.0 * t.abs_sum() + 1.0;
    const Model m = compile(t.to_expr(), Expr(strength));
    ASSERT_LE(m.num_variables(), 12U);
    const auto orig = oracle::brute_min(t.labels.size(), [&](const auto& x) { return t.evaluate(x); });
    std::vector<std::string> vars;
    const auto reduced = oracle::qubo_min(m.to_qubo(), &vars);
    EXPECT_NEAR(orig.energy, reduced.energy, 1e-9);
  }
}

TEST(Quadratize, SoundOnAndOffTheSubcube) {
  std::mt19937_64 rng(4242);
  oracle::RandomSpec spec;
  spec.max_vars = 6;
  spec.max_terms = 6;
  spec.max_degree = 4;
  int checked = 0;
  while (checked < 25) {
    const oracle::TermList t = oracle::random_terms(rng, spec);
    const double strength = 3.0;
    const Model m = compile(t.to_expr(), Expr(strength));
    if (m.aux().empty() || m.aux().size() > 4) continue;
    ++checked;
    const QuboMap q = m.to_qubo();
    const std::vector<std::string> vars = m.sorted_labels();
    oracle::for_each_assignment(vars.size(), [&](const std::vector<int>& x) {
      const auto a = binary_of(vars, x);
      bool on_subcube = true;
      for (const auto& rec : m.aux()) {
        if (a.at(rec.label) != a.at(rec.left) * a.at(rec.right)) on_subcube = false;
      }
      // Term-list variables that cancelled out of the model read as 0.
      std::vector<int> xo(t.labels.size());
      for (std::size_t i = 0; i < t.labels.size(); ++i) {
        auto it = a.find(t.labels[i]);
        xo[i] = it == a.end() ? 0 : it->second;
      }
      const DecodedSample d = decode_sample(m, {Assignment(a.begin(), a.end()), Vartype::Binary});
      double penalty = 0.0;
      for (const auto& rec : m.aux()) penalty += d.constraints.at(rec.label).energy;
      if (on_subcube) {
        EXPECT_NEAR(oracle::qubo_energy(q, a), t.evaluate(xo), 1e-9);
        EXPECT_NEAR(penalty, 0.0, 1e-12);
      } else {
        EXPECT_GE(penalty, strength - 1e-9);
      }
    });
  }
}

TEST(Compile, Deterministic) {
  auto build = [] {
    const VariableArray x = array_create("x", {6});
    Expr h(0.0);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = i + 1; j < 6; ++j) h += static_cast<double>(i + j) * x[i] * x[j] * x[(j + 1) % 6];
    }
    return emit(from_model(compile(h)));
  };
  EXPECT_EQ(build(), build());
}

TEST(Normalize, DividesByLargestEntry) {
  QuboMap q;
  q.entries = {{{"x", "y"}, 4.0}, {{"x", "x"}, 2.0}};
  q.offset = 8.0;
  const QuboMap n = normalize(q);
  EXPECT_EQ(n.entries.at({"x", "y"}), 1.0);
  EXPECT_EQ(n.entries.at({"x", "x"}), 0.5);
  EXPECT_EQ(n.offset, 2.0);
  EXPECT_EQ(normalize(n), n);
}

TEST(Normalize, AllZeroUnchanged) {
  QuboMap q;
  q.entries = {{{"x", "x"}, 0.0}};
  q.offset = 3.0;
  EXPECT_EQ(normalize(q), q);
}

TEST(Normalize, PreservesArgmin) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> coef(-10.0, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    QuboMap q;
    for (int i = 0; i < 8; ++i) {
      for (int j = i; j < 8; ++j) q.add("v" + std::to_string(i), "v" + std::to_string(j), coef(rng));
    }
    const auto before = oracle::qubo_min(q);
    const auto after = oracle::qubo_min(normalize(q));
    EXPECT_EQ(before.argmin, after.argmin);
  }
}

TEST(QuboEqual, FoldsAndCompares) {
  QuboMap a;
  a.entries[{"a", "b"}] = 2.0;
  QuboMap b;
  b.entries[{"b", "a"}] = 2.0;  // stored raw, not canonicalised
  EXPECT_TRUE(qubo_equal(a, b, 0.0));

  QuboMap c;
  c.entries[{"a", "b"}] = 1.0;
  c.entries[{"b", "a"}] = 1.0;
  EXPECT_TRUE(qubo_equal(a, c, 1e-12));

  QuboMap d = a;
  d.offset = 1.0;
  EXPECT_FALSE(qubo_equal(a, d, 1e-3));
}

TEST(QuboEqual, ToleranceBoundary) {
  QuboMap a;
  a.entries[{"a", "b"}] = 1.0;
  QuboMap b = a;
  b.entries[{"a", "b"}] += 2e-6;
  EXPECT_FALSE(qubo_equal(a, b, 1e-6));
  EXPECT_TRUE(qubo_equal(a, b, 1e-5));
}

TEST(Energy, SpinSampleIsConverted) {
  const Model m = compile(spin("s") * spin("t"));
  EXPECT_DOUBLE_EQ(m.energy({{"s", -1}, {"t", -1}}, Vartype::Spin), 1.0);
  EXPECT_DOUBLE_EQ(m.energy({{"s", -1}, {"t", 1}}, Vartype::Spin), -1.0);
  EXPECT_THROW(m.energy({{"s", 0}, {"t", 1}}, Vartype::Spin), Error);
  EXPECT_THROW(m.energy({{"s", 1}}, Vartype::Spin), Error);
}
