#pragma once

// Multilinear polynomials over 0/1 variables whose coefficients are themselves
// polynomials in placeholder symbols.
//
// A product of variables is a sorted array of variable indices. Since x*x == x
// for binary variables, the product of two monomials is the sorted union of
// their index arrays, which a linear merge computes in O(|a| + |b|).

#include <algorithm>
#include <compare>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "quboc/error.hpp"

namespace quboc {

using VarIndex = std::uint32_t;
using PlaceholderIndex = std::uint32_t;

/// Magnitude under which a coefficient entry is treated as zero and dropped.
inline constexpr double kPruneTolerance = 1e-12;

/// Sorted array of indices. With `Unique` the array is a set (variable
/// products, idempotent); without it the array is a multiset (placeholder
/// products, where repeats encode powers).
template <typename Index, bool Unique>
class SortedProduct {
 public:
  using index_type = Index;

  SortedProduct() = default;

  SortedProduct(std::initializer_list<Index> indices)
      : SortedProduct(std::vector<Index>(indices)) {}

  explicit SortedProduct(std::vector<Index> indices) : indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    if constexpr (Unique) {
      indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
    }
  }

  /// Adopts an array already in canonical order without re-sorting.
  static SortedProduct from_sorted(std::vector<Index> indices) {
    SortedProduct p;
    p.indices_ = std::move(indices);
    return p;
  }

  std::span<const Index> indices() const noexcept { return indices_; }
  std::size_t degree() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  Index operator[](std::size_t i) const noexcept { return indices_[i]; }

  bool contains(Index i) const noexcept {
    return std::binary_search(indices_.begin(), indices_.end(), i);
  }

  /// Element-wise equality; short-circuits on a length mismatch.
  friend bool operator==(const SortedProduct& a, const SortedProduct& b) noexcept {
    if (a.indices_.size() != b.indices_.size()) return false;
    return std::equal(a.indices_.begin(), a.indices_.end(), b.indices_.begin());
  }

  friend std::strong_ordering operator<=>(const SortedProduct& a,
                                          const SortedProduct& b) noexcept {
    return std::lexicographical_compare_three_way(a.indices_.begin(), a.indices_.end(),
                                                  b.indices_.begin(), b.indices_.end());
  }

  std::size_t hash() const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ULL ^ indices_.size();
    for (Index i : indices_) {
      h ^= static_cast<std::size_t>(i) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }

  /// Product of two monomials: sorted merge, deduplicated for sets.
  friend SortedProduct merge(const SortedProduct& a, const SortedProduct& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    std::vector<Index> out;
    out.reserve(a.indices_.size() + b.indices_.size());
    if constexpr (Unique) {
      std::set_union(a.indices_.begin(), a.indices_.end(), b.indices_.begin(),
                     b.indices_.end(), std::back_inserter(out));
    } else {
      std::merge(a.indices_.begin(), a.indices_.end(), b.indices_.begin(),
                 b.indices_.end(), std::back_inserter(out));
    }
    return from_sorted(std::move(out));
  }

 private:
  std::vector<Index> indices_;
};

using VarProduct = SortedProduct<VarIndex, true>;
using PlaceholderProduct = SortedProduct<PlaceholderIndex, false>;

struct ProductHash {
  template <typename P>
  std::size_t operator()(const P& p) const noexcept {
    return p.hash();
  }
};

inline VarProduct prod_union(const VarProduct& a, const VarProduct& b) { return merge(a, b); }
inline bool prod_equal(const VarProduct& a, const VarProduct& b) { return a == b; }

/// A polynomial in placeholders: sorted (product -> value) entries, no zeros.
/// The overwhelmingly common case is a single entry with an empty product,
/// i.e. a plain number, so a flat vector beats a node-based map here.
class Coefficient {
 public:
  using Entry = std::pair<PlaceholderProduct, double>;

  Coefficient() = default;
  Coefficient(double value) {  // NOLINT(google-explicit-constructor)
    if (std::abs(value) >= kPruneTolerance) entries_.emplace_back(PlaceholderProduct{}, value);
  }

  static Coefficient placeholder(PlaceholderIndex index, double scale = 1.0) {
    Coefficient c;
    if (std::abs(scale) >= kPruneTolerance) c.entries_.emplace_back(PlaceholderProduct{index}, scale);
    return c;
  }

  std::span<const Entry> entries() const noexcept { return entries_; }
  bool is_zero() const noexcept { return entries_.empty(); }

  /// True when no placeholder occurs.
  bool is_numeric() const noexcept {
    return entries_.empty() || (entries_.size() == 1 && entries_[0].first.empty());
  }

  /// Value of the placeholder-free part.
  double constant() const noexcept {
    return (!entries_.empty() && entries_[0].first.empty()) ? entries_[0].second : 0.0;
  }

  /// Evaluates with placeholder values indexed by PlaceholderIndex.
  double evaluate(std::span<const double> placeholder_values) const {
    double total = 0.0;
    for (const auto& [prod, value] : entries_) {
      double term = value;
      for (PlaceholderIndex p : prod.indices()) {
        if (p >= placeholder_values.size()) {
          throw Error(ErrorCode::MissingPlaceholder, "placeholder index out of range");
        }
        term *= placeholder_values[p];
      }
      total += term;
    }
    return total;
  }

  Coefficient& operator+=(const Coefficient& other) {
    if (other.entries_.empty()) return *this;
    if (&other == this) return *this *= 2.0;
    if (entries_.empty()) {
      entries_ = other.entries_;
      return *this;
    }
    if (entries_.size() == 1 && other.entries_.size() == 1 &&
        entries_[0].first == other.entries_[0].first) {
      entries_[0].second += other.entries_[0].second;
      if (std::abs(entries_[0].second) < kPruneTolerance) entries_.clear();
      return *this;
    }
    std::vector<Entry> out;
    out.reserve(entries_.size() + other.entries_.size());
    auto i = entries_.begin();
    auto j = other.entries_.begin();
    while (i != entries_.end() || j != other.entries_.end()) {
      if (j == other.entries_.end() || (i != entries_.end() && i->first < j->first)) {
        out.push_back(std::move(*i++));
      } else if (i == entries_.end() || j->first < i->first) {
        out.push_back(*j++);
      } else {
        double v = i->second + j->second;
        if (std::abs(v) >= kPruneTolerance) out.emplace_back(std::move(i->first), v);
        ++i;
        ++j;
      }
    }
    entries_ = std::move(out);
    return *this;
  }

  Coefficient& operator*=(double scale) {
    for (auto& e : entries_) e.second *= scale;
    prune();
    return *this;
  }

  friend Coefficient operator+(Coefficient a, const Coefficient& b) { return a += b; }

  friend Coefficient operator*(const Coefficient& a, const Coefficient& b) {
    Coefficient out;
    if (a.is_zero() || b.is_zero()) return out;
    if (a.entries_.size() == 1 && b.entries_.size() == 1) {
      double v = a.entries_[0].second * b.entries_[0].second;
      if (std::abs(v) >= kPruneTolerance) {
        out.entries_.emplace_back(merge(a.entries_[0].first, b.entries_[0].first), v);
      }
      return out;
    }
    for (const auto& [pa, va] : a.entries_) {
      for (const auto& [pb, vb] : b.entries_) {
        Coefficient term;
        double v = va * vb;
        if (std::abs(v) >= kPruneTolerance) term.entries_.emplace_back(merge(pa, pb), v);
        out += term;
      }
    }
    return out;
  }

  friend Coefficient operator*(Coefficient a, double s) { return a *= s; }
  friend Coefficient operator*(double s, Coefficient a) { return a *= s; }

  friend bool operator==(const Coefficient& a, const Coefficient& b) = default;

  /// Entry-wise comparison within an absolute tolerance.
  bool approx_equal(const Coefficient& other, double tol) const {
    Coefficient diff = *this;
    diff += other * -1.0;
    return std::all_of(diff.entries_.begin(), diff.entries_.end(),
                       [tol](const Entry& e) { return std::abs(e.second) <= tol; });
  }

 private:
  void prune() {
    std::erase_if(entries_, [](const Entry& e) { return std::abs(e.second) < kPruneTolerance; });
  }

  std::vector<Entry> entries_;
};

/// Polynomial over binary variables: VarProduct -> Coefficient, with no
/// zero coefficients stored. Iteration order is unspecified; use
/// sorted_terms() where determinism matters.
class Polynomial {
 public:
  using Map = std::unordered_map<VarProduct, Coefficient, ProductHash>;
  using Term = std::pair<VarProduct, Coefficient>;

  Polynomial() = default;

  static Polynomial constant(const Coefficient& c) {
    Polynomial p;
    p.add_term(VarProduct{}, c);
    return p;
  }

  static Polynomial variable(VarIndex v, double scale = 1.0) {
    Polynomial p;
    p.add_term(VarProduct{v}, scale);
    return p;
  }

  const Map& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }

  std::size_t degree() const noexcept {
    std::size_t d = 0;
    for (const auto& [prod, c] : terms_) d = std::max(d, prod.degree());
    return d;
  }

  /// Coefficient of a product, zero if absent.
  Coefficient coefficient(const VarProduct& prod) const {
    auto it = terms_.find(prod);
    return it == terms_.end() ? Coefficient{} : it->second;
  }

  void reserve(std::size_t n) { terms_.reserve(n); }

  void add_term(const VarProduct& prod, const Coefficient& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(prod, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  void add_term(VarProduct&& prod, const Coefficient& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(std::move(prod), c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& other) {
    if (terms_.empty()) {
      terms_ = other.terms_;
      return *this;
    }
    for (const auto& [prod, c] : other.terms_) add_term(prod, c);
    return *this;
  }

  /// Merges the smaller operand into the larger one so chains of sums stay
  /// linear regardless of how the sum tree leans.
  Polynomial& operator+=(Polynomial&& other) {
    if (other.terms_.size() > terms_.size()) std::swap(terms_, other.terms_);
    for (auto& [prod, c] : other.terms_) add_term(prod, c);
    return *this;
  }

  Polynomial& operator*=(const Coefficient& c) {
    if (c.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second = it->second * c;
      if (it->second.is_zero()) {
        it = terms_.erase(it);
      } else {
        ++it;
      }
    }
    return *this;
  }

  /// Terms sorted by product (degree-major is not implied; the order is
  /// lexicographic on index arrays).
  std::vector<Term> sorted_terms() const {
    std::vector<Term> out(terms_.begin(), terms_.end());
    std::sort(out.begin(), out.end(),
              [](const Term& a, const Term& b) { return a.first < b.first; });
    return out;
  }

  /// Evaluates at a 0/1 assignment indexed by VarIndex.
  template <typename Value>
  double evaluate(std::span<const Value> assignment,
                  std::span<const double> placeholder_values = {}) const {
    double total = 0.0;
    for (const auto& [prod, c] : terms_) {
      bool on = true;
      for (VarIndex v : prod.indices()) {
        if (v >= assignment.size()) {
          throw Error(ErrorCode::MissingVariable, "variable index out of range");
        }
        if (assignment[v] == 0) {
          on = false;
          break;
        }
      }
      if (on) total += c.evaluate(placeholder_values);
    }
    return total;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) = default;

  bool approx_equal(const Polynomial& other, double tol) const {
    auto check = [tol](const Polynomial& x, const Polynomial& y) {
      for (const auto& [prod, c] : x.terms_) {
        if (!c.approx_equal(y.coefficient(prod), tol)) return false;
      }
      return true;
    };
    return check(*this, other) && check(other, *this);
  }

 private:
  Map terms_;
};

inline Polynomial poly_sum(const Polynomial& a, const Polynomial& b) {
  Polynomial out = a;
  out += b;
  return out;
}

inline Polynomial poly_prod(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  if (a.empty() || b.empty()) return out;
  out.reserve(a.size() * b.size());
  for (const auto& [pa, ca] : a.terms()) {
    for (const auto& [pb, cb] : b.terms()) {
      out.add_term(prod_union(pa, pb), ca * cb);
    }
  }
  return out;
}

inline double coeff_eval(const Coefficient& c, std::span<const double> placeholder_values) {
  return c.evaluate(placeholder_values);
}

}  // namespace quboc
