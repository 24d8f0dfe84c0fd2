#pragma once

// Logic gates, logic-constraint penalties, adders and an array multiplier.
//
// Gate expressions compute the output of a gate from binary operands.
// Constraint penalties instead take the output as an operand and are zero
// exactly on the gate's truth table (minimised over any ancilla), >= 1 off it.
// Bit lists are least-significant bit first throughout.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quboc/encodings.hpp"
#include "quboc/error.hpp"
#include "quboc/expr.hpp"

namespace quboc {

inline Expr gate_not(const Expr& a) { return 1.0 - a; }
inline Expr gate_and(const Expr& a, const Expr& b) { return a * b; }
inline Expr gate_or(const Expr& a, const Expr& b) { return a + b - a * b; }
inline Expr gate_xor(const Expr& a, const Expr& b) { return a + b - 2.0 * a * b; }

/// 2ab - a - b + 1: zero iff out == NOT a.
inline Expr not_const(const Expr& a, const Expr& out, std::string label) {
  return constraint(2.0 * a * out - a - out + 1.0, std::move(label));
}

/// ab - 2c(a + b) + 3c: zero iff c == a AND b.
inline Expr and_const(const Expr& a, const Expr& b, const Expr& out, std::string label) {
  return constraint(a * b - 2.0 * out * (a + b) + 3.0 * out, std::move(label));
}

/// ab + a + b + c - 2c(a + b): zero iff c == a OR b.
inline Expr or_const(const Expr& a, const Expr& b, const Expr& out, std::string label) {
  return constraint(a * b + a + b + out - 2.0 * out * (a + b), std::move(label));
}

/// (a + b - c - 2w)^2 with ancilla w = "<label>_aux": a + b - c is even iff
/// c == a XOR b, and then w = ab zeroes it; otherwise the square is odd.
inline Expr xor_const(const Expr& a, const Expr& b, const Expr& out, std::string label) {
  Expr w = binary(label + "_aux");
  return constraint(pow(a + b - out - 2.0 * w, 2), std::move(label));
}

/// XOR for the sum ("<label>_xor") plus AND for the carry ("<label>_and").
inline Expr half_adder_const(const Expr& a, const Expr& b, const Expr& sum, const Expr& carry,
                             const std::string& label) {
  return and_const(a, b, carry, label + "_and") + xor_const(a, b, sum, label + "_xor");
}

/// Two half adders whose carries meet in an OR. Internal wires are
/// "<label>_w0" (first sum), "<label>_w1" (first carry), "<label>_w2"
/// (second carry).
inline Expr full_adder_const(const Expr& a, const Expr& b, const Expr& carry_in, const Expr& sum,
                             const Expr& carry_out, const std::string& label) {
  Expr s1 = binary(label + "_w0");
  Expr c1 = binary(label + "_w1");
  Expr c2 = binary(label + "_w2");
  return half_adder_const(a, b, s1, c1, label + "_ha0") +
         half_adder_const(s1, carry_in, sum, c2, label + "_ha1") +
         or_const(c1, c2, carry_out, label + "_or");
}

/// Array multiplier constraining p == a * b. Partial products b_m a_n are AND
/// constraints; each row m >= 1 is added into the running sum with a ripple of
/// half/full adders. Outputs that are final are tied directly to p bits, so
/// Number nodes in `p` fix the product.
inline Expr multiplier_const(std::span<const Expr> a, std::span<const Expr> b,
                             std::span<const Expr> p, const std::string& label) {
  const std::size_t j = a.size();
  const std::size_t k = b.size();
  if (j == 0 || k == 0) throw Error(ErrorCode::InvalidArgument, "multiplier operands are empty");
  if (p.size() != j + k) {
    throw Error(ErrorCode::InvalidArgument,
                "product has " + std::to_string(p.size()) + " bits, expected " +
                    std::to_string(j + k));
  }

  std::size_t wire_count = 0;
  auto wire = [&]() { return binary(label + "_w" + std::to_string(wire_count++)); };
  // Output bit at `pos`, either the product bit (when final) or a new wire.
  auto output = [&](std::size_t pos, bool final) { return final ? p[pos] : wire(); };

  Expr h(0.0);
  bool first = true;
  auto append = [&](const Expr& term) {
    h = first ? term : h + term;
    first = false;
  };

  std::vector<std::optional<Expr>> column(j + k);
  for (std::size_t n = 0; n < j; ++n) {
    Expr out = output(n, k == 1 || n == 0);
    append(and_const(a[n], b[0], out,
                     label + "_and0_" + std::to_string(n)));
    column[n] = out;
  }

  for (std::size_t m = 1; m < k; ++m) {
    const bool last_row = m + 1 == k;
    std::optional<Expr> carry;
    for (std::size_t n = 0; n < j; ++n) {
      const std::size_t pos = m + n;
      const bool final = last_row || pos == m;
      // A partial product with nothing to add to is itself the column's output.
      Expr pp = !column[pos] && !carry ? output(pos, final) : wire();
      append(and_const(a[n], b[m], pp,
                       label + "_and" + std::to_string(m) + "_" + std::to_string(n)));
      const std::string tag = std::to_string(m) + "_" + std::to_string(n);
      if (column[pos] && carry) {
        Expr s = output(pos, final);
        Expr c = n + 1 == j ? output(m + j, last_row) : wire();
        append(full_adder_const(*column[pos], pp, *carry, s, c, label + "_fa" + tag));
        column[pos] = s;
        carry = c;
      } else if (column[pos] || carry) {
        const Expr& other = column[pos] ? *column[pos] : *carry;
        Expr s = output(pos, final);
        Expr c = n + 1 == j ? output(m + j, last_row) : wire();
        append(half_adder_const(other, pp, s, c, label + "_ha" + tag));
        column[pos] = s;
        carry = c;
      } else {
        column[pos] = pp;
      }
    }
    column[m + j] = carry;
  }

  // Bits no adder drives must be zero (only the top bit when k == 1).
  for (std::size_t pos = 0; pos < j + k; ++pos) {
    if (!column[pos]) append(constraint(p[pos], label + "_zero" + std::to_string(pos)));
  }
  return h;
}

/// Factoring Hamiltonian: operands "a[i]" and "b[i]" are free binaries, the
/// product bits are fixed numbers.
struct FactoringProblem {
  VariableArray a;
  VariableArray b;
  Expr hamiltonian;
};

inline FactoringProblem factoring_problem(std::uint64_t product, std::size_t a_bits,
                                          std::size_t b_bits, const std::string& label = "mul") {
  if (a_bits == 0 || b_bits == 0 || a_bits + b_bits > 62) {
    throw Error(ErrorCode::InvalidArgument, "operand widths must be positive and total <= 62");
  }
  if (product >> (a_bits + b_bits)) {
    throw Error(ErrorCode::InvalidArgument,
                std::to_string(product) + " does not fit in " +
                    std::to_string(a_bits + b_bits) + " bits");
  }
  VariableArray a = array_create("a", {a_bits});
  VariableArray b = array_create("b", {b_bits});
  std::vector<Expr> p;
  for (std::size_t i = 0; i < a_bits + b_bits; ++i) {
    p.emplace_back(static_cast<double>((product >> i) & 1U));
  }
  Expr h = multiplier_const(a.elements(), b.elements(), p, label);
  return {std::move(a), std::move(b), std::move(h)};
}

/// Integer value of bits `prefix[0]`, `prefix[1]`, ... (LSB first) in a sample.
inline std::uint64_t decode_bits(const Assignment& sample, const std::string& prefix,
                                 std::size_t width) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width; ++i) {
    const std::string l = prefix + "[" + std::to_string(i) + "]";
    auto it = sample.find(l);
    if (it == sample.end()) throw Error(ErrorCode::MissingVariable, "sample lacks '" + l + "'");
    if (it->second != 0) v |= std::uint64_t{1} << i;
  }
  return v;
}

}  // namespace quboc
