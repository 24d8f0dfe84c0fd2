#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "quboc/quboc.hpp"

using namespace quboc;

namespace {

std::uint64_t bits_of(double v) {
  std::uint64_t b;
  std::memcpy(&b, &v, sizeof b);
  return b;
}

}  // namespace

TEST(QuboFile, RoundTripIsBitExact) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> real(-1e6, 1e6);
  QuboFile f;
  f.variables = {"a", "b[0]", "quote\"d", "x*y"};
  f.qubo.linear = {{0, real(rng)}, {2, 1.0 / 3.0}, {3, 1e-300}};
  f.qubo.quadratic = {{0, 1, real(rng)}, {1, 3, -0.1}, {2, 3, 6.02214076e23}};
  f.qubo.offset = std::nextafter(1.0, 2.0);
  f.constraints = {{"c0", {{{1, 2.5}}, {{0, 3, -1.0}}, 0.125}}};
  const QuboFile back = parse(emit(f));
  EXPECT_EQ(back, f);
  EXPECT_EQ(bits_of(std::get<2>(back.qubo.quadratic[0])), bits_of(std::get<2>(f.qubo.quadratic[0])));
  EXPECT_EQ(bits_of(back.qubo.offset), bits_of(f.qubo.offset));
  EXPECT_EQ(emit(back), emit(f));
}

TEST(QuboFile, NegativeZeroAndNonFinite) {
  QuboFile f;
  f.variables = {"a"};
  f.qubo.offset = -0.0;
  EXPECT_NE(emit(f).find("\"offset\": 0,"), std::string::npos);
  f.qubo.offset = std::numeric_limits<double>::infinity();
  EXPECT_THROW(emit(f), Error);
}

TEST(QuboFile, ParseErrors) {
  auto code_of = [](const std::string& text) {
    try {
      parse(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;  // sentinel: parse succeeded
  };
  const std::string ok_tail = R"(, "variables": ["a", "b"], "linear": [], "quadratic": [], "offset": 0})";
  EXPECT_NO_THROW(parse(R"({"format_version": 1)" + ok_tail));
  EXPECT_EQ(code_of("{"), ErrorCode::ParseError);
  EXPECT_EQ(code_of(R"({"format_version": 2)" + ok_tail), ErrorCode::ParseError);
  EXPECT_EQ(code_of(R"({"variables": []})"), ErrorCode::ParseError);
  EXPECT_EQ(code_of(R"({"format_version": 1, "variables": ["a"], "linear": [[1, 2.0]], "quadratic": [], "offset": 0})"),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of(R"({"format_version": 1, "variables": ["a"], "linear": [], "quadratic": [[0, 0, 1]], "offset": 0})"),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of(R"({"format_version": 1, "variables": ["a"], "linear": [[-1, 1]], "quadratic": [], "offset": 0})"),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of(R"({"format_version": 1, "variables": ["a"], "linear": [[0, "x"]], "quadratic": [], "offset": 0})"),
            ErrorCode::ParseError);
}

TEST(QuboFile, TransposedPairsAreAccepted) {
  const QuboFile f = parse(
      R"({"format_version": 1, "variables": ["a", "b"], "linear": [[0, 1]], "quadratic": [[1, 0, -2]], "offset": 0.5})");
  EXPECT_TRUE(qubo_equal(f.to_qubo_map(), compile(binary("a") - 2.0 * binary("a") * binary("b") + 0.5).to_qubo(),
                         1e-12));
}

TEST(QuboFile, FromModelAgreesWithModel) {
  std::mt19937_64 rng(31);
  oracle::RandomSpec spec;
  spec.max_vars = 6;
  spec.spin_fraction = 0.3;
  for (int trial = 0; trial < 30; ++trial) {
    const oracle::TermList t = oracle::random_terms(rng, spec);
    const Expr x = binary("zz_extra");
    const Model m = compile(t.to_expr() + constraint(pow(x - 1.0, 2), "c") + placeholder("p") * x);
    const PlaceholderValues feed{{"p", 1.5}};
    const QuboFile f = from_model(m, feed);
    EXPECT_EQ(f.variables, m.sorted_labels());
    EXPECT_TRUE(qubo_equal(f.to_qubo_map(), m.to_qubo(feed), 1e-9));
    const std::vector<std::string> vars = m.sorted_labels();
    oracle::for_each_assignment(vars.size(), [&](const std::vector<int>& bits) {
      Assignment a;
      for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = bits[i];
      const DecodedSample from_file = f.decode({a, Vartype::Binary});
      const DecodedSample from_model = decode_sample(m, {a, Vartype::Binary}, feed);
      EXPECT_NEAR(from_file.energy, from_model.energy, 1e-9);
      ASSERT_EQ(from_file.constraints.size(), from_model.constraints.size());
      for (const auto& [label, st] : from_model.constraints) {
        EXPECT_EQ(from_file.constraints.at(label).satisfied, st.satisfied);
        EXPECT_NEAR(from_file.constraints.at(label).energy, st.energy, 1e-9);
      }
    });
  }
}

TEST(QuboFile, UpperTriangleAndSortedEntries) {
  const Model m = compile(binary("z") * binary("a") + binary("m") * binary("a") - binary("m"));
  const QuboFile f = from_model(m);
  for (const auto& [i, j, v] : f.qubo.quadratic) EXPECT_LT(i, j);
  EXPECT_TRUE(std::ranges::is_sorted(f.qubo.quadratic));
  EXPECT_TRUE(std::ranges::is_sorted(f.qubo.linear));
}

TEST(QuboFile, HighDegreeConstraintIsRejected) {
  const Expr a = binary("a"), b = binary("b"), c = binary("c");
  const Model m = compile(constraint(a * b * c, "cube"));
  try {
    from_model(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedOperation);
  }
}

TEST(QuboFile, MissingSampleVariable) {
  const QuboFile f = from_model(compile(binary("a") * binary("b")));
  EXPECT_THROW(f.decode({{{"a", 1}}, Vartype::Binary}), Error);
}

TEST(QuboFile, WriteAndRead) {
  const std::filesystem::path path = std::filesystem::temp_directory_path() / "quboc_roundtrip.json";
  const QuboFile f = from_model(compile(number_partition({4, 2, 7, 1})));
  write_qubo_file(f, path.string());
  EXPECT_EQ(read_qubo_file(path.string()), f);
  std::filesystem::remove(path);
  EXPECT_THROW(read_qubo_file(path.string()), Error);
}

TEST(QuboFile, DeterministicEmission) {
  auto build = [] {
    return emit(from_model(compile(factoring_problem(15, 3, 3).hamiltonian)));
  };
  EXPECT_EQ(build(), build());
}
