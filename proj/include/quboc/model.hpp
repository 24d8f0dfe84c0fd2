#pragma once

// Compilation: expression DAG -> multilinear polynomial -> quadratic model,
// and emission of the model as a QUBO map, Ising maps, or a QUBO matrix.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "quboc/error.hpp"
#include "quboc/expr.hpp"
#include "quboc/poly.hpp"

namespace quboc {

enum class Vartype { Binary, Spin };

inline std::string_view to_string(Vartype v) { return v == Vartype::Binary ? "BINARY" : "SPIN"; }

using PlaceholderValues = std::map<std::string, double, std::less<>>;
using Assignment = std::map<std::string, int, std::less<>>;

/// Default penalty strength applied to auxiliary-variable AND constraints.
inline constexpr double kDefaultStrength = 5.0;

/// Bidirectional label <-> dense index table.
class SymbolTable {
 public:
  std::optional<std::uint32_t> find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::uint32_t intern(const std::string& label) {
    auto [it, inserted] = index_.try_emplace(label, static_cast<std::uint32_t>(labels_.size()));
    if (inserted) labels_.push_back(label);
    return it->second;
  }

  const std::string& label(std::uint32_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }
  bool contains(std::string_view label) const { return find(label).has_value(); }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// ---------------------------------------------------------------------------
// Emission types

/// QUBO as a map from canonically ordered label pairs to values. Diagonal
/// keys (v, v) carry linear coefficients; the constant lives in `offset`.
template <typename Label>
struct BasicQuboMap {
  using Key = std::pair<Label, Label>;

  std::map<Key, double> entries;
  double offset = 0.0;

  static Key canonical(Label a, Label b) {
    if (b < a) std::swap(a, b);
    return {std::move(a), std::move(b)};
  }

  void add(const Label& a, const Label& b, double value) { entries[canonical(a, b)] += value; }

  std::vector<Label> variables() const {
    std::vector<Label> out;
    for (const auto& [key, v] : entries) {
      out.push_back(key.first);
      out.push_back(key.second);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  template <typename Sample>
  double energy(const Sample& x) const {
    double e = offset;
    for (const auto& [key, v] : entries) {
      auto a = x.find(key.first);
      auto b = x.find(key.second);
      if (a == x.end() || b == x.end()) {
        throw Error(ErrorCode::MissingVariable, "sample does not cover the QUBO");
      }
      if (a->second != 0 && b->second != 0) e += v;
    }
    return e;
  }

  friend bool operator==(const BasicQuboMap&, const BasicQuboMap&) = default;
};

using QuboMap = BasicQuboMap<std::string>;
using IndexedQuboMap = BasicQuboMap<std::size_t>;

struct IsingMaps {
  std::map<std::string, double> linear;
  std::map<std::pair<std::string, std::string>, double> quadratic;
  double offset = 0.0;

  /// Energy at a spin assignment (values in {-1, +1}).
  template <typename Sample>
  double energy(const Sample& s) const {
    auto spin_of = [&s](const std::string& l) {
      auto it = s.find(l);
      if (it == s.end()) throw Error(ErrorCode::MissingVariable, "sample lacks '" + l + "'");
      return static_cast<double>(it->second);
    };
    double e = offset;
    for (const auto& [l, h] : linear) e += h * spin_of(l);
    for (const auto& [key, j] : quadratic) e += j * spin_of(key.first) * spin_of(key.second);
    return e;
  }
};

/// Upper-triangular QUBO matrix: Q(i,i) linear, Q(i,j) for i<j quadratic.
struct QuboMatrix {
  std::vector<std::string> variables;
  std::vector<double> values;  // row-major n x n
  double offset = 0.0;

  std::size_t size() const noexcept { return variables.size(); }
  double operator()(std::size_t i, std::size_t j) const { return values[i * size() + j]; }

  /// x^T Q x + offset.
  template <typename Value>
  double energy(std::span<const Value> x) const {
    const std::size_t n = size();
    double e = offset;
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] == 0) continue;
      for (std::size_t j = i; j < n; ++j) {
        if (x[j] != 0) e += values[i * n + j];
      }
    }
    return e;
  }
};

// ---------------------------------------------------------------------------
// Expansion

struct Expansion {
  Polynomial polynomial;
  SymbolTable variables;
  std::vector<Vartype> variable_kinds;
  SymbolTable placeholders;
  std::map<std::string, Polynomial> constraints;
};

namespace detail {

class Expander {
 public:
  explicit Expander(Expansion& out) : out_(out) {}

  /// Expands `root` and then every penalty reachable from it (each once).
  Polynomial expand_with_penalties(const Node* root) {
    Polynomial result = expand_value(root);
    while (!pending_.empty()) {
      const Node* penalty = pending_.front();
      pending_.pop_front();
      result += expand_value(penalty);
    }
    return result;
  }

  /// Expands a subtree. Spin variables are rewritten as 2x - 1 over a binary
  /// variable with the same label; penalties are queued, not added.
  Polynomial expand_value(const Node* root) {
    struct Slot {
      int refs = 0;
      bool done = false;
      Polynomial poly;
    };
    std::unordered_map<const Node*, Slot> slots;

    // Pass 1: count in-DAG references so shared results are copied only
    // while another consumer still needs them.
    std::vector<const Node*> todo{root};
    slots[root];
    while (!todo.empty()) {
      const Node* n = todo.back();
      todo.pop_back();
      for_each_child(n, [&](const Node* c) {
        auto [it, inserted] = slots.try_emplace(c);
        ++it->second.refs;
        if (inserted) todo.push_back(c);
      });
    }

    auto take = [&slots](const Node* c) {
      Slot& s = slots.at(c);
      if (--s.refs <= 0) return std::move(s.poly);
      return s.poly;
    };

    // Pass 2: post-order evaluation, left operand first.
    std::vector<std::pair<const Node*, bool>> stack{{root, false}};
    while (!stack.empty()) {
      auto [n, children_pushed] = stack.back();
      if (slots[n].done) {
        stack.pop_back();
        continue;
      }
      if (!children_pushed) {
        stack.back().second = true;
        if (n->right && pushes_right(n->kind) && !slots[n->right.get()].done) {
          stack.emplace_back(n->right.get(), false);
        }
        if (n->left && !slots[n->left.get()].done) stack.emplace_back(n->left.get(), false);
        continue;
      }
      stack.pop_back();
      Slot& slot = slots[n];
      slot.poly = evaluate(n, take);
      slot.done = true;
    }
    Slot& r = slots[root];
    return std::move(r.poly);
  }

 private:
  static bool pushes_right(NodeKind k) { return k == NodeKind::Add || k == NodeKind::Mul; }

  template <typename F>
  static void for_each_child(const Node* n, F&& f) {
    if (n->left) f(n->left.get());
    if (n->right && pushes_right(n->kind)) f(n->right.get());
  }

  VarIndex intern_variable(const Node* n) {
    const Vartype kind = n->kind == NodeKind::Spin ? Vartype::Spin : Vartype::Binary;
    VarIndex i = out_.variables.intern(n->label);
    if (i == out_.variable_kinds.size()) {
      out_.variable_kinds.push_back(kind);
    } else if (out_.variable_kinds[i] != kind) {
      throw Error(ErrorCode::LabelConflict,
                  "'" + n->label + "' is used both as a binary and as a spin variable");
    }
    return i;
  }

  template <typename Take>
  Polynomial evaluate(const Node* n, Take& take) {
    switch (n->kind) {
      case NodeKind::Number:
        return Polynomial::constant(n->value);
      case NodeKind::Binary:
        return Polynomial::variable(intern_variable(n));
      case NodeKind::Spin: {
        Polynomial p = Polynomial::variable(intern_variable(n), 2.0);
        p.add_term(VarProduct{}, -1.0);
        return p;
      }
      case NodeKind::Placeholder:
        return Polynomial::constant(Coefficient::placeholder(out_.placeholders.intern(n->label)));
      case NodeKind::Add: {
        Polynomial l = take(n->left.get());
        l += take(n->right.get());
        return l;
      }
      case NodeKind::Mul: {
        Polynomial l = take(n->left.get());
        Polynomial r = take(n->right.get());
        if (auto c = as_constant(r)) {
          l *= *c;
          return l;
        }
        if (auto c = as_constant(l)) {
          r *= *c;
          return r;
        }
        return poly_prod(l, r);
      }
      case NodeKind::Pow:
        return power(take(n->left.get()), n->exponent);
      case NodeKind::Constraint: {
        Polynomial p = take(n->left.get());
        auto [it, inserted] = constraint_owner_.try_emplace(n->label, n);
        if (!inserted && it->second != n) {
          throw Error(ErrorCode::DuplicateConstraint, "constraint '" + n->label + "'");
        }
        if (inserted) out_.constraints[n->label] = p;
        return p;
      }
      case NodeKind::WithPenalty: {
        auto [it, inserted] = penalty_owner_.try_emplace(n->label, n);
        if (!inserted && it->second != n) {
          throw Error(ErrorCode::DuplicateConstraint, "penalty '" + n->label + "'");
        }
        if (inserted) pending_.push_back(n->right.get());
        return take(n->left.get());
      }
    }
    throw Error(ErrorCode::UnsupportedOperation, "unknown node kind");
  }

  static std::optional<Coefficient> as_constant(const Polynomial& p) {
    if (p.empty()) return Coefficient{};
    if (p.size() == 1 && p.terms().begin()->first.empty()) return p.terms().begin()->second;
    return std::nullopt;
  }

  static Polynomial power(Polynomial base, unsigned exponent) {
    Polynomial result = Polynomial::constant(1.0);
    bool first = true;
    while (exponent > 0) {
      if (exponent & 1U) {
        result = first ? base : poly_prod(result, base);
        first = false;
      }
      exponent >>= 1U;
      if (exponent > 0) base = poly_prod(base, base);
    }
    return result;
  }

  Expansion& out_;
  std::unordered_map<std::string, const Node*> constraint_owner_;
  std::unordered_map<std::string, const Node*> penalty_owner_;
  std::deque<const Node*> pending_;
};

}  // namespace detail

/// Expands an expression into a multilinear polynomial over binary
/// variables, registering constraints and adding penalties once each.
inline Expansion expand(const Expr& root) {
  Expansion out;
  detail::Expander expander(out);
  out.polynomial = expander.expand_with_penalties(root.id());
  return out;
}

// ---------------------------------------------------------------------------
// Quadratization

struct AuxRecord {
  std::string label;
  VarIndex index = 0;
  std::string left;
  std::string right;
  VarIndex left_index = 0;
  VarIndex right_index = 0;
  Coefficient strength;
};

/// xy - 2a(x + y) + 3a: zero iff a == x*y, at least 1 otherwise.
inline Polynomial and_penalty(VarIndex aux, VarIndex x, VarIndex y) {
  Polynomial p;
  p.add_term(VarProduct{x, y}, 1.0);
  p.add_term(VarProduct{aux, x}, -2.0);
  p.add_term(VarProduct{aux, y}, -2.0);
  p.add_term(VarProduct{aux}, 3.0);
  return p;
}

struct Quadratization {
  Polynomial polynomial;
  std::vector<AuxRecord> aux;
};

/// Reduces `p` to degree <= 2. Repeatedly picks the variable pair occurring in
/// the most terms of degree > 2 (ties: lexicographically smallest label pair),
/// replaces it there by a fresh variable labelled "left*right", and adds
/// strength * AND(aux, left, right).
inline Quadratization quadratize(const Polynomial& p, const Coefficient& strength,
                                 SymbolTable& variables) {
  Quadratization out{p, {}};
  for (;;) {
    std::map<std::pair<VarIndex, VarIndex>, std::size_t> counts;
    for (const auto& [prod, c] : out.polynomial.terms()) {
      if (prod.degree() <= 2) continue;
      auto idx = prod.indices();
      for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = i + 1; j < idx.size(); ++j) ++counts[{idx[i], idx[j]}];
      }
    }
    if (counts.empty()) break;

    auto label_pair = [&variables](std::pair<VarIndex, VarIndex> k) {
      const std::string& a = variables.label(k.first);
      const std::string& b = variables.label(k.second);
      return a < b ? std::pair<const std::string&, const std::string&>{a, b}
                   : std::pair<const std::string&, const std::string&>{b, a};
    };
    auto best = counts.begin();
    for (auto it = std::next(counts.begin()); it != counts.end(); ++it) {
      if (it->second > best->second ||
          (it->second == best->second && label_pair(it->first) < label_pair(best->first))) {
        best = it;
      }
    }

    auto [lo_label, hi_label] = label_pair(best->first);
    AuxRecord rec;
    rec.label = lo_label + "*" + hi_label;
    rec.left = lo_label;
    rec.right = hi_label;
    if (variables.contains(rec.label)) {
      throw Error(ErrorCode::LabelConflict,
                  "auxiliary label '" + rec.label + "' is already a variable");
    }
    rec.left_index = *variables.find(rec.left);
    rec.right_index = *variables.find(rec.right);
    rec.index = variables.intern(rec.label);
    rec.strength = strength;

    const VarIndex x = best->first.first;
    const VarIndex y = best->first.second;
    Polynomial next;
    next.reserve(out.polynomial.size() + 4);
    for (const auto& [prod, c] : out.polynomial.terms()) {
      if (prod.degree() > 2 && prod.contains(x) && prod.contains(y)) {
        std::vector<VarIndex> idx;
        idx.reserve(prod.degree() - 1);
        for (VarIndex v : prod.indices()) {
          if (v != x && v != y) idx.push_back(v);
        }
        idx.push_back(rec.index);  // newest index is the largest
        next.add_term(VarProduct::from_sorted(std::move(idx)), c);
      } else {
        next.add_term(prod, c);
      }
    }
    Polynomial penalty = and_penalty(rec.index, x, y);
    penalty *= strength;
    next += std::move(penalty);
    out.polynomial = std::move(next);
    out.aux.push_back(std::move(rec));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model

struct QuboOptions {
  /// Emit (v, v): 0 for variables that have no linear term.
  bool zero_diagonals = true;
};

class Model {
 public:
  Model() = default;

  const Polynomial& polynomial() const noexcept { return poly_; }
  const SymbolTable& variables() const noexcept { return variables_; }
  const SymbolTable& placeholders() const noexcept { return placeholders_; }
  const std::map<std::string, Polynomial>& constraints() const noexcept { return constraints_; }
  const std::vector<AuxRecord>& aux() const noexcept { return aux_; }
  std::size_t num_variables() const noexcept { return variables_.size(); }

  /// Declared kind of a variable; auxiliaries are binary.
  Vartype variable_kind(VarIndex i) const { return kinds_.at(i); }

  /// Variable labels in emission order (lexicographic).
  std::vector<std::string> sorted_labels() const {
    std::vector<std::string> out = variables_.labels();
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Placeholder values by index; throws listing every absent label.
  std::vector<double> resolve(const PlaceholderValues& feed) const {
    std::vector<double> values(placeholders_.size(), 0.0);
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < placeholders_.size(); ++i) {
      const std::string& l = placeholders_.label(static_cast<std::uint32_t>(i));
      auto it = feed.find(l);
      if (it == feed.end()) {
        missing.push_back(l);
      } else {
        values[i] = it->second;
      }
    }
    if (!missing.empty()) {
      throw Error(ErrorCode::MissingPlaceholder, "no value for " + detail::join_labels(missing));
    }
    return values;
  }

  QuboMap to_qubo(const PlaceholderValues& feed = {}, QuboOptions opts = {}) const {
    const std::vector<double> ph = resolve(feed);
    QuboMap q;
    for (const auto& [prod, c] : poly_.terms()) {
      const double v = c.evaluate(ph);
      switch (prod.degree()) {
        case 0:
          q.offset += v;
          break;
        case 1:
          q.add(variables_.label(prod[0]), variables_.label(prod[0]), v);
          break;
        default:
          q.add(variables_.label(prod[0]), variables_.label(prod[1]), v);
          break;
      }
    }
    if (opts.zero_diagonals) {
      for (const auto& l : variables_.labels()) q.entries.try_emplace({l, l}, 0.0);
    }
    return q;
  }

  /// QUBO keyed by positions in sorted_labels().
  IndexedQuboMap to_qubo_indexed(const PlaceholderValues& feed = {}, QuboOptions opts = {}) const {
    const QuboMap q = to_qubo(feed, opts);
    const std::vector<std::string> order = sorted_labels();
    std::unordered_map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i) pos.emplace(order[i], i);
    IndexedQuboMap out;
    out.offset = q.offset;
    for (const auto& [key, v] : q.entries) out.add(pos.at(key.first), pos.at(key.second), v);
    return out;
  }

  /// Ising form from substituting x = (s + 1) / 2 into the QUBO.
  IsingMaps to_ising(const PlaceholderValues& feed = {}) const {
    const QuboMap q = to_qubo(feed);
    IsingMaps m;
    m.offset = q.offset;
    for (const auto& l : variables_.labels()) m.linear.emplace(l, 0.0);
    for (const auto& [key, v] : q.entries) {
      if (key.first == key.second) {
        m.linear[key.first] += v / 2.0;
        m.offset += v / 2.0;
      } else {
        m.quadratic[key] += v / 4.0;
        m.linear[key.first] += v / 4.0;
        m.linear[key.second] += v / 4.0;
        m.offset += v / 4.0;
      }
    }
    return m;
  }

  QuboMatrix to_matrix(const PlaceholderValues& feed = {}) const {
    const std::vector<double> ph = resolve(feed);
    QuboMatrix m;
    m.variables = sorted_labels();
    const std::size_t n = m.variables.size();
    std::vector<std::size_t> pos(n);
    for (std::size_t i = 0; i < n; ++i) pos[*variables_.find(m.variables[i])] = i;
    m.values.assign(n * n, 0.0);
    for (const auto& [prod, c] : poly_.terms()) {
      const double v = c.evaluate(ph);
      if (prod.degree() == 0) {
        m.offset += v;
        continue;
      }
      std::size_t i = pos[prod[0]];
      std::size_t j = prod.degree() == 1 ? i : pos[prod[1]];
      if (j < i) std::swap(i, j);
      m.values[i * n + j] += v;
    }
    return m;
  }

  /// 0/1 assignment by internal index. Spin samples are mapped via
  /// x = (s + 1) / 2. Throws listing every model variable the sample lacks.
  std::vector<std::int8_t> binary_assignment(const Assignment& sample, Vartype vartype) const {
    std::vector<std::int8_t> x(variables_.size(), 0);
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < variables_.size(); ++i) {
      const std::string& l = variables_.label(static_cast<std::uint32_t>(i));
      auto it = sample.find(l);
      if (it == sample.end()) {
        missing.push_back(l);
        continue;
      }
      x[i] = to_binary(l, it->second, vartype);
    }
    if (!missing.empty()) {
      throw Error(ErrorCode::MissingVariable, "sample lacks " + detail::join_labels(missing));
    }
    return x;
  }

  double energy(const Assignment& sample, Vartype vartype = Vartype::Binary,
                const PlaceholderValues& feed = {}) const {
    const std::vector<std::int8_t> x = binary_assignment(sample, vartype);
    const std::vector<double> ph = resolve(feed);
    return poly_.evaluate(std::span<const std::int8_t>(x), ph);
  }

  static std::int8_t to_binary(const std::string& label, int value, Vartype vartype) {
    if (vartype == Vartype::Binary) {
      if (value != 0 && value != 1) {
        throw Error(ErrorCode::InvalidArgument,
                    "binary value for '" + label + "' must be 0 or 1, got " + std::to_string(value));
      }
      return static_cast<std::int8_t>(value);
    }
    if (value != -1 && value != 1) {
      throw Error(ErrorCode::InvalidArgument,
                  "spin value for '" + label + "' must be -1 or 1, got " + std::to_string(value));
    }
    return static_cast<std::int8_t>((value + 1) / 2);
  }

 private:
  friend Model compile(const Expr& root, const Expr& strength);

  Polynomial poly_;
  SymbolTable variables_;
  std::vector<Vartype> kinds_;
  SymbolTable placeholders_;
  std::map<std::string, Polynomial> constraints_;
  std::vector<AuxRecord> aux_;
};

/// Expands `root` and reduces it to a quadratic model. `strength` weights the
/// AND penalties of auxiliary variables; it may involve placeholders but no
/// variables, and is only expanded when a reduction is needed.
inline Model compile(const Expr& root, const Expr& strength) {
  Expansion ex;
  detail::Expander expander(ex);
  ex.polynomial = expander.expand_with_penalties(root.id());

  Model m;
  if (ex.polynomial.degree() > 2) {
    Polynomial s = expander.expand_value(strength.id());
    if (s.degree() > 0) {
      throw Error(ErrorCode::InvalidArgument, "reduction strength must not contain variables");
    }
    Quadratization q = quadratize(ex.polynomial, s.coefficient(VarProduct{}), ex.variables);
    for (const auto& rec : q.aux) {
      Polynomial penalty = and_penalty(rec.index, rec.left_index, rec.right_index);
      penalty *= rec.strength;
      auto [it, inserted] = ex.constraints.try_emplace(rec.label, std::move(penalty));
      if (!inserted) {
        throw Error(ErrorCode::DuplicateConstraint,
                    "constraint '" + rec.label + "' clashes with an auxiliary variable");
      }
      ex.variable_kinds.push_back(Vartype::Binary);
    }
    m.poly_ = std::move(q.polynomial);
    m.aux_ = std::move(q.aux);
  } else {
    m.poly_ = std::move(ex.polynomial);
  }
  m.variables_ = std::move(ex.variables);
  m.kinds_ = std::move(ex.variable_kinds);
  m.placeholders_ = std::move(ex.placeholders);
  m.constraints_ = std::move(ex.constraints);
  return m;
}

inline Model compile(const Expr& root) { return compile(root, Expr(kDefaultStrength)); }

// ---------------------------------------------------------------------------
// QUBO utilities

/// Scales entries and offset by 1 / max |entry|. An all-zero QUBO is returned
/// unchanged.
template <typename Label>
BasicQuboMap<Label> normalize(const BasicQuboMap<Label>& q) {
  double peak = 0.0;
  for (const auto& [key, v] : q.entries) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return q;
  BasicQuboMap<Label> out = q;
  for (auto& [key, v] : out.entries) v /= peak;
  out.offset /= peak;
  return out;
}

/// Equality after folding (i, j)/(j, i) into canonical order and dropping
/// entries with |v| <= tol; values and offsets must agree within tol.
template <typename Label>
bool qubo_equal(const BasicQuboMap<Label>& a, const BasicQuboMap<Label>& b, double tol) {
  auto fold = [tol](const BasicQuboMap<Label>& q) {
    std::map<std::pair<Label, Label>, double> out;
    for (const auto& [key, v] : q.entries) {
      out[BasicQuboMap<Label>::canonical(key.first, key.second)] += v;
    }
    std::erase_if(out, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
    return out;
  };
  if (std::abs(a.offset - b.offset) > tol) return false;
  const auto fa = fold(a);
  const auto fb = fold(b);
  if (fa.size() != fb.size()) return false;
  for (auto i = fa.begin(), j = fb.begin(); i != fa.end(); ++i, ++j) {
    if (i->first != j->first || std::abs(i->second - j->second) > tol) return false;
  }
  return true;
}

}  // namespace quboc
