#pragma once

// Versioned JSON interchange format for emitted QUBOs.
//
//   {"format_version": 1,
//    "variables": ["a", "b"],
//    "linear": [[0, 1.5]],
//    "quadratic": [[0, 1, -2]],
//    "offset": 0,
//    "constraints": [{"label": "c", "linear": [...], "quadratic": [...], "offset": 0}]}
//
// Output is written by hand so that it is byte-for-byte deterministic; reals
// use 17 significant digits and therefore parse back to the same double.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "quboc/error.hpp"
#include "quboc/model.hpp"
#include "quboc/solve.hpp"

namespace quboc {

struct QuboTerms {
  std::vector<std::pair<std::size_t, double>> linear;
  std::vector<std::tuple<std::size_t, std::size_t, double>> quadratic;
  double offset = 0.0;

  double energy(std::span<const std::int8_t> x) const {
    double e = offset;
    for (const auto& [i, v] : linear) {
      if (x[i]) e += v;
    }
    for (const auto& [i, j, v] : quadratic) {
      if (x[i] && x[j]) e += v;
    }
    return e;
  }

  friend bool operator==(const QuboTerms&, const QuboTerms&) = default;
};

struct FileConstraint {
  std::string label;
  QuboTerms terms;

  friend bool operator==(const FileConstraint&, const FileConstraint&) = default;
};

struct QuboFile {
  static constexpr int kFormatVersion = 1;

  int format_version = kFormatVersion;
  std::vector<std::string> variables;
  QuboTerms qubo;
  std::vector<FileConstraint> constraints;

  QuboMap to_qubo_map() const {
    QuboMap q;
    q.offset = qubo.offset;
    for (const auto& [i, v] : qubo.linear) q.add(variables[i], variables[i], v);
    for (const auto& [i, j, v] : qubo.quadratic) q.add(variables[i], variables[j], v);
    return q;
  }

  /// Positions of `sample`'s values in variable order.
  std::vector<std::int8_t> binary_assignment(const Sample& sample) const {
    std::vector<std::int8_t> x(variables.size(), 0);
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < variables.size(); ++i) {
      auto it = sample.values.find(variables[i]);
      if (it == sample.values.end()) {
        missing.push_back(variables[i]);
      } else {
        x[i] = Model::to_binary(variables[i], it->second, sample.vartype);
      }
    }
    if (!missing.empty()) {
      throw Error(ErrorCode::MissingVariable, "sample lacks " + detail::join_labels(missing));
    }
    return x;
  }

  /// Energy and constraint report from the embedded constraint terms.
  DecodedSample decode(const Sample& sample) const {
    const std::vector<std::int8_t> x = binary_assignment(sample);
    DecodedSample d{sample, qubo.energy(x), {}};
    for (const auto& c : constraints) {
      const double e = c.terms.energy(x);
      d.constraints.emplace(c.label, ConstraintStatus{std::abs(e) <= kSatisfiedTolerance, e});
    }
    return d;
  }

  friend bool operator==(const QuboFile&, const QuboFile&) = default;
};

namespace detail {

inline std::string format_real(double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "QUBO value is not finite");
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void emit_terms(std::ostringstream& os, const QuboTerms& t) {
  os << "\"linear\": [";
  for (std::size_t k = 0; k < t.linear.size(); ++k) {
    os << (k ? ", " : "") << '[' << t.linear[k].first << ", " << format_real(t.linear[k].second)
       << ']';
  }
  os << "], \"quadratic\": [";
  for (std::size_t k = 0; k < t.quadratic.size(); ++k) {
    const auto& [i, j, v] = t.quadratic[k];
    os << (k ? ", " : "") << '[' << i << ", " << j << ", " << format_real(v) << ']';
  }
  os << "], \"offset\": " << format_real(t.offset);
}

inline QuboTerms parse_terms(const nlohmann::json& j, std::size_t n) {
  QuboTerms t;
  auto index = [n](const nlohmann::json& v) {
    if (!v.is_number_unsigned()) throw Error(ErrorCode::ParseError, "index is not a non-negative integer");
    const auto i = v.get<std::size_t>();
    if (i >= n) throw Error(ErrorCode::ParseError, "index " + std::to_string(i) + " out of range");
    return i;
  };
  auto real = [](const nlohmann::json& v) {
    if (!v.is_number()) throw Error(ErrorCode::ParseError, "expected a number");
    return v.get<double>();
  };
  for (const auto& e : j.at("linear")) {
    if (!e.is_array() || e.size() != 2) throw Error(ErrorCode::ParseError, "linear entry must be [i, v]");
    t.linear.emplace_back(index(e[0]), real(e[1]));
  }
  for (const auto& e : j.at("quadratic")) {
    if (!e.is_array() || e.size() != 3) {
      throw Error(ErrorCode::ParseError, "quadratic entry must be [i, j, v]");
    }
    const std::size_t a = index(e[0]);
    const std::size_t b = index(e[1]);
    if (a == b) throw Error(ErrorCode::ParseError, "quadratic entry on the diagonal");
    t.quadratic.emplace_back(a, b, real(e[2]));
  }
  t.offset = real(j.at("offset"));
  return t;
}

}  // namespace detail

inline std::string emit(const QuboFile& f) {
  std::ostringstream os;
  os << "{\n  \"format_version\": " << f.format_version << ",\n  \"variables\": [";
  for (std::size_t i = 0; i < f.variables.size(); ++i) {
    os << (i ? ", " : "") << nlohmann::json(f.variables[i]).dump();
  }
  os << "],\n  ";
  detail::emit_terms(os, f.qubo);
  os << ",\n  \"constraints\": [";
  for (std::size_t k = 0; k < f.constraints.size(); ++k) {
    os << (k ? ",\n    " : "\n    ") << "{\"label\": " << nlohmann::json(f.constraints[k].label).dump()
       << ", ";
    detail::emit_terms(os, f.constraints[k].terms);
    os << '}';
  }
  os << (f.constraints.empty() ? "]" : "\n  ]") << "\n}\n";
  return os.str();
}

/// Parses a QuboFile. Quadratic pairs may be given in either order.
inline QuboFile parse(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  try {
    QuboFile f;
    f.format_version = j.at("format_version").get<int>();
    if (f.format_version != QuboFile::kFormatVersion) {
      throw Error(ErrorCode::ParseError,
                  "unsupported format_version " + std::to_string(f.format_version));
    }
    for (const auto& v : j.at("variables")) f.variables.push_back(v.get<std::string>());
    f.qubo = detail::parse_terms(j, f.variables.size());
    if (j.contains("constraints")) {
      for (const auto& c : j.at("constraints")) {
        f.constraints.push_back({c.at("label").get<std::string>(),
                                 detail::parse_terms(c, f.variables.size())});
      }
    }
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

inline QuboFile read_qubo_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

inline void write_qubo_file(const QuboFile& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  out << emit(f);
  if (!out) throw Error(ErrorCode::InvalidArgument, "failed writing '" + path + "'");
}

namespace detail {

inline QuboTerms terms_from_map(const QuboMap& q,
                                const std::unordered_map<std::string, std::size_t>& pos) {
  QuboTerms t;
  t.offset = q.offset;
  for (const auto& [key, v] : q.entries) {
    const std::size_t i = pos.at(key.first);
    const std::size_t j = pos.at(key.second);
    if (i == j) {
      t.linear.emplace_back(i, v);
    } else {
      t.quadratic.emplace_back(std::min(i, j), std::max(i, j), v);
    }
  }
  return t;
}

inline std::unordered_map<std::string, std::size_t> positions(
    const std::vector<std::string>& labels) {
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < labels.size(); ++i) pos.emplace(labels[i], i);
  return pos;
}

}  // namespace detail

/// File from a QUBO map alone (no constraints).
inline QuboFile from_qubo(const QuboMap& q) {
  QuboFile f;
  f.variables = q.variables();
  f.qubo = detail::terms_from_map(q, detail::positions(f.variables));
  return f;
}

/// Emits a compiled model with its constraints. Every constraint must be at
/// most quadratic.
inline QuboFile from_model(const Model& m, const PlaceholderValues& feed = {},
                           QuboOptions opts = {}) {
  QuboFile f;
  f.variables = m.sorted_labels();
  const auto pos = detail::positions(f.variables);
  f.qubo = detail::terms_from_map(m.to_qubo(feed, opts), pos);

  const std::vector<double> ph = m.resolve(feed);
  std::vector<std::size_t> slot(m.num_variables());
  for (std::size_t i = 0; i < m.num_variables(); ++i) {
    slot[i] = pos.at(m.variables().label(static_cast<std::uint32_t>(i)));
  }
  for (const auto& [label, poly] : m.constraints()) {
    if (poly.degree() > 2) {
      throw Error(ErrorCode::UnsupportedOperation,
                  "constraint '" + label + "' has degree " + std::to_string(poly.degree()) +
                      "; only quadratic constraints can be written");
    }
    std::map<std::pair<std::size_t, std::size_t>, double> entries;
    FileConstraint c{label, {}};
    for (const auto& [prod, coeff] : poly.terms()) {
      const double v = coeff.evaluate(ph);
      if (prod.degree() == 0) {
        c.terms.offset += v;
      } else {
        std::size_t i = slot[prod[0]];
        std::size_t j = prod.degree() == 1 ? i : slot[prod[1]];
        entries[{std::min(i, j), std::max(i, j)}] += v;
      }
    }
    for (const auto& [ij, v] : entries) {
      if (ij.first == ij.second) {
        c.terms.linear.emplace_back(ij.first, v);
      } else {
        c.terms.quadratic.emplace_back(ij.first, ij.second, v);
      }
    }
    f.constraints.push_back(std::move(c));
  }
  return f;
}

}  // namespace quboc
