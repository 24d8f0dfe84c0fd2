#pragma once

// Hamiltonian expressions as an immutable DAG.
//
// Every operator allocates exactly one node that references its operands, so
// `h = h + term` in a loop costs O(1) per term and subexpressions can be shared
// freely. Variables are identified by (kind, label); label conflicts are only
// detected when the expression is compiled.

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "quboc/error.hpp"

namespace quboc {

enum class NodeKind : std::uint8_t {
  Number,
  Binary,
  Spin,
  Placeholder,
  Add,
  Mul,
  Pow,
  Constraint,
  // Value expression plus a penalty that compile() adds to the Hamiltonian
  // once per label, however often the value is used.
  WithPenalty,
};

namespace detail {

inline std::atomic<std::uint64_t>& node_counter() {
  static std::atomic<std::uint64_t> counter{0};
  return counter;
}

}  // namespace detail

/// Number of expression nodes allocated by this process so far.
inline std::uint64_t node_allocations() {
  return detail::node_counter().load(std::memory_order_relaxed);
}

struct Node {
  using Ptr = std::shared_ptr<const Node>;

  Node(NodeKind k, double v, std::string l, Ptr lhs, Ptr rhs, unsigned e)
      : kind(k), value(v), label(std::move(l)), left(std::move(lhs)), right(std::move(rhs)),
        exponent(e) {
    detail::node_counter().fetch_add(1, std::memory_order_relaxed);
  }

  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;

  // Long sum chains are deep; unlink uniquely-owned children iteratively so
  // destruction does not recurse once per term.
  ~Node() {
    std::vector<Ptr> stack;
    auto detach = [&stack](Ptr& p) {
      if (p && p.use_count() == 1) stack.push_back(std::move(p));
      p.reset();
    };
    detach(left);
    detach(right);
    while (!stack.empty()) {
      Ptr n = std::move(stack.back());
      stack.pop_back();
      detach(n->left);
      detach(n->right);
    }
  }

  NodeKind kind;
  double value;
  std::string label;
  mutable Ptr left;
  mutable Ptr right;
  unsigned exponent;
};

class Expr {
 public:
  /// Numbers convert implicitly so `2 * x + 1` reads naturally.
  Expr(double value)  // NOLINT(google-explicit-constructor)
      : node_(make(NodeKind::Number, value, {}, nullptr, nullptr, 0)) {}

  explicit Expr(Node::Ptr node) : node_(std::move(node)) {}

  NodeKind kind() const noexcept { return node_->kind; }
  double value() const noexcept { return node_->value; }
  const std::string& label() const noexcept { return node_->label; }
  unsigned exponent() const noexcept { return node_->exponent; }
  Expr left() const { return Expr(node_->left); }
  Expr right() const { return Expr(node_->right); }
  const Node* id() const noexcept { return node_.get(); }
  const Node::Ptr& node() const noexcept { return node_; }

  bool is_variable() const noexcept {
    return kind() == NodeKind::Binary || kind() == NodeKind::Spin;
  }

  Expr& operator+=(const Expr& rhs);
  Expr& operator-=(const Expr& rhs);
  Expr& operator*=(const Expr& rhs);

  static Node::Ptr make(NodeKind kind, double value, std::string label, Node::Ptr left,
                        Node::Ptr right, unsigned exponent) {
    return std::make_shared<const Node>(kind, value, std::move(label), std::move(left),
                                        std::move(right), exponent);
  }

 private:
  Node::Ptr node_;
};

namespace detail {

inline std::string checked_label(std::string label, const char* what) {
  if (label.empty()) throw Error(ErrorCode::InvalidLabel, std::string(what) + " label is empty");
  return label;
}

}  // namespace detail

inline Expr num(double value) { return Expr(value); }

inline Expr binary(std::string label) {
  return Expr(Expr::make(NodeKind::Binary, 0.0, detail::checked_label(std::move(label), "binary"),
                         nullptr, nullptr, 0));
}

inline Expr spin(std::string label) {
  return Expr(Expr::make(NodeKind::Spin, 0.0, detail::checked_label(std::move(label), "spin"),
                         nullptr, nullptr, 0));
}

inline Expr placeholder(std::string label) {
  return Expr(Expr::make(NodeKind::Placeholder, 0.0,
                         detail::checked_label(std::move(label), "placeholder"), nullptr, nullptr,
                         0));
}

inline Expr add(const Expr& l, const Expr& r) {
  return Expr(Expr::make(NodeKind::Add, 0.0, {}, l.node(), r.node(), 0));
}

inline Expr mul(const Expr& l, const Expr& r) {
  return Expr(Expr::make(NodeKind::Mul, 0.0, {}, l.node(), r.node(), 0));
}

inline Expr pow(const Expr& base, int exponent) {
  if (exponent < 0) {
    throw Error(ErrorCode::UnsupportedOperation,
                "negative exponent " + std::to_string(exponent));
  }
  return Expr(Expr::make(NodeKind::Pow, 0.0, {}, base.node(), nullptr,
                         static_cast<unsigned>(exponent)));
}

/// a - b is sugar for a + (-1) * b.
inline Expr sub(const Expr& l, const Expr& r) { return add(l, mul(num(-1.0), r)); }

/// Marks `inner` as a named constraint. The wrapped term contributes to the
/// Hamiltonian unchanged; compile() also records its polynomial under `label`
/// so decoded samples can report whether it is satisfied.
inline Expr constraint(const Expr& inner, std::string label) {
  return Expr(Expr::make(NodeKind::Constraint, 0.0,
                         detail::checked_label(std::move(label), "constraint"), inner.node(),
                         nullptr, 0));
}

/// Evaluates as `value` wherever it is used; `penalty` is added to the compiled
/// Hamiltonian exactly once per label.
inline Expr with_penalty(const Expr& value, const Expr& penalty, std::string label) {
  return Expr(Expr::make(NodeKind::WithPenalty, 0.0,
                         detail::checked_label(std::move(label), "penalty"), value.node(),
                         penalty.node(), 0));
}

inline Expr operator+(const Expr& l, const Expr& r) { return add(l, r); }
inline Expr operator-(const Expr& l, const Expr& r) { return sub(l, r); }
inline Expr operator*(const Expr& l, const Expr& r) { return mul(l, r); }
inline Expr operator-(const Expr& e) { return mul(num(-1.0), e); }

inline Expr& Expr::operator+=(const Expr& rhs) { return *this = add(*this, rhs); }
inline Expr& Expr::operator-=(const Expr& rhs) { return *this = sub(*this, rhs); }
inline Expr& Expr::operator*=(const Expr& rhs) { return *this = mul(*this, rhs); }

/// Sum of a range of expressions, built as a left-leaning chain.
template <typename Range>
Expr sum(const Range& terms) {
  bool first = true;
  Expr total(0.0);
  for (const auto& t : terms) {
    if (first) {
      total = Expr(t);
      first = false;
    } else {
      total += Expr(t);
    }
  }
  return total;
}

}  // namespace quboc
