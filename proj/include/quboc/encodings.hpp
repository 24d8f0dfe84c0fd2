#pragma once

// Arrays of variables and integers encoded with binary variables.

#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "quboc/error.hpp"
#include "quboc/expr.hpp"
#include "quboc/model.hpp"

namespace quboc {

/// Shaped collection of variables labelled "base[i]", "base[i][j]", ...
class VariableArray {
 public:
  VariableArray(std::string label, std::vector<std::size_t> shape, Vartype vartype)
      : label_(std::move(label)), shape_(std::move(shape)), vartype_(vartype) {
    if (label_.empty()) throw Error(ErrorCode::InvalidLabel, "array label is empty");
    if (shape_.empty()) throw Error(ErrorCode::InvalidArgument, "array shape is empty");
    for (std::size_t d : shape_) {
      if (d == 0) throw Error(ErrorCode::InvalidArgument, "array dimension must be positive");
    }
    const std::size_t total =
        std::accumulate(shape_.begin(), shape_.end(), std::size_t{1}, std::multiplies<>());
    elements_.reserve(total);
    std::vector<std::size_t> idx(shape_.size(), 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::string l = label_;
      for (std::size_t i : idx) l += "[" + std::to_string(i) + "]";
      elements_.push_back(vartype_ == Vartype::Binary ? binary(l) : spin(l));
      for (std::size_t k = shape_.size(); k-- > 0;) {
        if (++idx[k] < shape_[k]) break;
        idx[k] = 0;
      }
    }
  }

  const std::string& label() const noexcept { return label_; }
  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  Vartype vartype() const noexcept { return vartype_; }
  std::size_t size() const noexcept { return elements_.size(); }
  const std::vector<Expr>& elements() const noexcept { return elements_; }

  /// Element by flat (row-major) position.
  const Expr& operator[](std::size_t flat) const { return elements_.at(flat); }

  const Expr& at(std::initializer_list<std::size_t> index) const {
    if (index.size() != shape_.size()) {
      throw Error(ErrorCode::InvalidArgument, "index rank does not match array shape");
    }
    std::size_t flat = 0;
    std::size_t k = 0;
    for (std::size_t i : index) {
      if (i >= shape_[k]) throw Error(ErrorCode::InvalidArgument, "array index out of range");
      flat = flat * shape_[k] + i;
      ++k;
    }
    return elements_[flat];
  }

  auto begin() const noexcept { return elements_.begin(); }
  auto end() const noexcept { return elements_.end(); }

 private:
  std::string label_;
  std::vector<std::size_t> shape_;
  Vartype vartype_;
  std::vector<Expr> elements_;
};

inline VariableArray array_create(std::string label, std::vector<std::size_t> shape,
                                  Vartype vartype = Vartype::Binary) {
  return VariableArray(std::move(label), std::move(shape), vartype);
}

enum class IntegerEncoding { OneHot, Unary, Log, Order };

/// An integer in [lower, upper] represented as lower + sum(weight_i * x_i).
/// Converts to an expression that carries the encoding's feasibility penalty,
/// so using the integer anywhere in a Hamiltonian adds the penalty once.
class EncodedInteger {
 public:
  struct Bit {
    std::string label;
    long long weight;
  };

  const std::string& label() const noexcept { return label_; }
  long long lower() const noexcept { return lower_; }
  long long upper() const noexcept { return upper_; }
  IntegerEncoding encoding() const noexcept { return encoding_; }
  const std::vector<Bit>& bits() const noexcept { return bits_; }

  /// The linear value expression without any penalty attached.
  const Expr& value_expr() const noexcept { return value_; }

  /// Constraint-wrapped penalty terms (empty for unary and log encodings).
  const std::vector<Expr>& constraint_exprs() const noexcept { return constraints_; }

  /// Value expression with the penalties attached.
  const Expr& expr() const noexcept { return expr_; }

  operator Expr() const { return expr(); }  // NOLINT(google-explicit-constructor)

  /// Integer represented by a binary assignment (penalties are not checked).
  long long decode(const Assignment& sample) const {
    long long v = offset_;
    for (const auto& b : bits_) {
      auto it = sample.find(b.label);
      if (it == sample.end()) throw Error(ErrorCode::MissingVariable, "sample lacks '" + b.label + "'");
      if (it->second != 0) v += b.weight;
    }
    return v;
  }

 private:
  friend EncodedInteger one_hot_integer(std::string, std::pair<long long, long long>, const Expr&);
  friend EncodedInteger unary_integer(std::string, std::pair<long long, long long>);
  friend EncodedInteger log_integer(std::string, std::pair<long long, long long>);
  friend EncodedInteger order_integer(std::string, std::pair<long long, long long>, const Expr&);

  EncodedInteger(std::string label, std::pair<long long, long long> range, IntegerEncoding enc)
      : label_(std::move(label)), lower_(range.first), upper_(range.second), encoding_(enc),
        value_(0.0) {
    if (label_.empty()) throw Error(ErrorCode::InvalidLabel, "integer label is empty");
    if (lower_ > upper_) {
      throw Error(ErrorCode::InvalidArgument, "integer range [" + std::to_string(lower_) + ", " +
                                                  std::to_string(upper_) + "] is empty");
    }
  }

  Expr add_bit(std::string bit_label, long long weight) {
    Expr x = binary(bit_label);
    bits_.push_back({std::move(bit_label), weight});
    return x;
  }

  std::string label_;
  long long lower_;
  long long upper_;
  IntegerEncoding encoding_;
  long long offset_ = 0;
  std::vector<Bit> bits_;
  // One node per integer, so repeated uses are recognised as the same penalty.
  void seal() {
    expr_ = constraints_.empty() ? value_ : with_penalty(value_, sum(constraints_), label_);
  }

  Expr value_;
  std::vector<Expr> constraints_;
  Expr expr_{0.0};
};

/// sum n*y_n over n in [lower, upper] with y_n labelled "label[n]", plus
/// strength * (1 - sum y_n)^2 registered as "<label>_one_hot".
inline EncodedInteger one_hot_integer(std::string label, std::pair<long long, long long> range,
                                      const Expr& strength) {
  EncodedInteger e(std::move(label), range, IntegerEncoding::OneHot);
  std::vector<Expr> ys;
  Expr value(0.0);
  for (long long n = e.lower_; n <= e.upper_; ++n) {
    Expr y = e.add_bit(e.label_ + "[" + std::to_string(n) + "]", n);
    ys.push_back(y);
    value = n == e.lower_ ? y * static_cast<double>(n) : value + y * static_cast<double>(n);
  }
  e.value_ = value;
  e.constraints_.push_back(
      constraint(strength * pow(1.0 - sum(ys), 2), e.label_ + "_one_hot"));
  e.seal();
  return e;
}

/// lower + sum x_i over upper - lower binaries; every assignment is feasible.
inline EncodedInteger unary_integer(std::string label, std::pair<long long, long long> range) {
  EncodedInteger e(std::move(label), range, IntegerEncoding::Unary);
  e.offset_ = e.lower_;
  Expr value(static_cast<double>(e.lower_));
  for (long long i = 0; i < e.upper_ - e.lower_; ++i) {
    value += e.add_bit(e.label_ + "[" + std::to_string(i) + "]", 1);
  }
  e.value_ = value;
  e.seal();
  return e;
}

/// lower + sum_{i<d} 2^i x_i + r x_d, where d is the number of whole bits that
/// fit in the span and r = span - (2^d - 1) tops the range up to `upper`
/// exactly. Every assignment is feasible.
inline EncodedInteger log_integer(std::string label, std::pair<long long, long long> range) {
  EncodedInteger e(std::move(label), range, IntegerEncoding::Log);
  e.offset_ = e.lower_;
  const long long span = e.upper_ - e.lower_;
  Expr value(static_cast<double>(e.lower_));
  long long covered = 0;  // 2^d - 1
  std::size_t i = 0;
  while (2 * covered + 1 <= span) {
    const long long w = covered + 1;
    value += e.add_bit(e.label_ + "[" + std::to_string(i++) + "]", w) * static_cast<double>(w);
    covered = 2 * covered + 1;
  }
  if (const long long r = span - covered; r > 0) {
    value += e.add_bit(e.label_ + "[" + std::to_string(i) + "]", r) * static_cast<double>(r);
  }
  e.value_ = value;
  e.seal();
  return e;
}

/// lower + sum x_i with strength * sum x_{i+1}(1 - x_i) registered as
/// "<label>_order", forcing x_0 >= x_1 >= ... on feasible assignments.
inline EncodedInteger order_integer(std::string label, std::pair<long long, long long> range,
                                    const Expr& strength) {
  EncodedInteger e(std::move(label), range, IntegerEncoding::Order);
  e.offset_ = e.lower_;
  Expr value(static_cast<double>(e.lower_));
  std::vector<Expr> xs;
  for (long long i = 0; i < e.upper_ - e.lower_; ++i) {
    xs.push_back(e.add_bit(e.label_ + "[" + std::to_string(i) + "]", 1));
    value += xs.back();
  }
  e.value_ = value;
  Expr penalty(0.0);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) penalty += xs[i + 1] * (1.0 - xs[i]);
  e.constraints_.push_back(constraint(strength * penalty, e.label_ + "_order"));
  e.seal();
  return e;
}

}  // namespace quboc
