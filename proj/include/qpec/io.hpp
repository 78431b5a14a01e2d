// Copyright 2026 The qpec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qpec/bases.hpp"
#include "qpec/bounds.hpp"
#include "qpec/channel.hpp"
#include "qpec/decomposer.hpp"
#include "qpec/noise.hpp"
#include "qpec/pec.hpp"

namespace qpec::io {

using nlohmann::json;

// Matrices: {"rows":n,"cols":m,"data":[[re,im],...]} in row-major order.

inline json to_json(const ComplexMatrix& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back({m(r, c).real(), m(r, c).imag()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

namespace detail {

[[noreturn]] inline void fail(const std::string& what) { throw Error(Errc::parse_error, what); }

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline double number(const json& j, const char* what) {
  if (!j.is_number()) fail(std::string(what) + " must be a number");
  return j.get<double>();
}

inline int count(const json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0 || j.get<long long>() > (1 << 20))
    fail(std::string(what) + " must be a nonnegative integer");
  return j.get<int>();
}

}  // namespace detail

inline ComplexMatrix matrix_from_json(const json& j) {
  const int rows = detail::count(detail::field(j, "rows"), "rows");
  const int cols = detail::count(detail::field(j, "cols"), "cols");
  const json& data = detail::field(j, "data");
  if (!data.is_array() || data.size() != static_cast<std::size_t>(rows) * cols)
    detail::fail("matrix data must hold rows*cols entries");
  ComplexMatrix m(rows, cols);
  std::size_t k = 0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c, ++k) {
      const json& e = data[k];
      if (e.is_number()) {
        m(r, c) = Complex(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2) {
        m(r, c) = Complex(detail::number(e[0], "real part"), detail::number(e[1], "imaginary part"));
      } else {
        detail::fail("matrix entries must be [re, im] pairs");
      }
    }
  return m;
}

// Channels: {"dim":d,"label":s,"superop":Matrix,"kraus":[Matrix,...]?}.

inline json to_json(const LinearMap& map) {
  return {{"dim", map.dim()}, {"label", map.label()}, {"superop", to_json(map.superop())}};
}

inline json to_json(const Channel& ch) {
  json j = to_json(static_cast<const LinearMap&>(ch));
  json kraus = json::array();
  for (const auto& k : ch.kraus()) kraus.push_back(to_json(k));
  j["kraus"] = std::move(kraus);
  return j;
}

/// A Channel from JSON. Kraus operators win when present (and must agree with
/// the superoperator if both are given); otherwise the superoperator must be
/// CP, and Kraus operators are extracted from its Choi matrix.
inline Channel channel_from_json(const json& j) {
  const std::string label = j.contains("label") ? j.at("label").get<std::string>() : "O";
  if (j.contains("kraus")) {
    std::vector<ComplexMatrix> kraus;
    for (const auto& k : j.at("kraus")) kraus.push_back(matrix_from_json(k));
    if (kraus.empty()) detail::fail("kraus list is empty");
    Channel ch(std::move(kraus), label);
    if (j.contains("superop") && max_abs(matrix_from_json(j.at("superop")) - ch.superop()) > 1e-10)
      throw Error(Errc::invalid_input, "channel '" + label + "': superop and Kraus operators disagree");
    if (j.contains("dim") && detail::count(j.at("dim"), "dim") != ch.dim())
      throw Error(Errc::invalid_dimension, "channel '" + label + "': dim does not match its Kraus operators");
    return ch;
  }
  const ComplexMatrix s = matrix_from_json(detail::field(j, "superop"));
  if (s.rows() != s.cols()) throw Error(Errc::invalid_dimension, "superop must be square");
  const LinearMap map(s, label);
  return channel_from_choi(choi(map), label);
}

// Noise specifications.

inline json to_json(const NoiseSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Depolarizing>) {
          return {{"type", "depolarizing"}, {"d", s.d}, {"eps", s.eps}};
        } else if constexpr (std::is_same_v<T, Dephasing>) {
          return {{"type", "dephasing"}, {"eps", s.eps}};
        } else if constexpr (std::is_same_v<T, GeneralizedDephasing>) {
          return {{"type", "gdeph"}, {"axis", {s.axis[0], s.axis[1], s.axis[2]}}, {"eps", s.eps}};
        } else if constexpr (std::is_same_v<T, AmplitudeDamping>) {
          return {{"type", "amplitude_damping"}, {"eps", s.eps}};
        } else {
          return {{"type", "general"},         {"eps", s.eps},          {"eps_plus", s.eps_plus},
                  {"eps_minus", s.eps_minus}, {"lambda", to_json(s.lambda)}, {"xi", to_json(s.xi)}};
        }
      },
      spec);
}

inline NoiseSpec noise_from_json(const json& j) {
  const json& type = detail::field(j, "type");
  if (!type.is_string()) detail::fail("noise type must be a string");
  const std::string t = type.get<std::string>();
  auto eps = [&](const char* key = "eps") { return detail::number(detail::field(j, key), key); };
  if (t == "depolarizing") return Depolarizing{j.contains("d") ? detail::count(j.at("d"), "d") : 2, eps()};
  if (t == "dephasing") return Dephasing{eps()};
  if (t == "amplitude_damping" || t == "ad") return AmplitudeDamping{eps()};
  if (t == "gdeph" || t == "generalized_dephasing") {
    const json& axis = detail::field(j, "axis");
    if (!axis.is_array() || axis.size() != 3) detail::fail("axis must be a 3-vector");
    return GeneralizedDephasing{
        {detail::number(axis[0], "axis"), detail::number(axis[1], "axis"), detail::number(axis[2], "axis")}, eps()};
  }
  if (t == "general") {
    return GeneralNoise{eps(), eps("eps_plus"), eps("eps_minus"), channel_from_json(detail::field(j, "lambda")),
                        channel_from_json(detail::field(j, "xi"))};
  }
  detail::fail("unknown noise type '" + t + "'");
}

namespace detail {

inline double parse_double(std::string_view text, const std::string& what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) fail(what + ": '" + std::string(text) + "' is not a number");
  return v;
}

inline int parse_int(std::string_view text, const std::string& what) {
  int v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) fail(what + ": '" + std::string(text) + "' is not an integer");
  return v;
}

class KeyValues {
 public:
  KeyValues(std::string_view name, std::string_view body) : name_(name) {
    std::size_t pos = 0;
    while (pos < body.size()) {
      std::size_t comma = body.find(',', pos);
      if (comma == std::string_view::npos) comma = body.size();
      const std::string_view item = body.substr(pos, comma - pos);
      const std::size_t eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0) fail(name_ + ": expected key=value, got '" + std::string(item) + "'");
      if (!values_.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1))).second)
        fail(name_ + ": duplicate key '" + std::string(item.substr(0, eq)) + "'");
      pos = comma + 1;
    }
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  const std::string& raw(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) fail(name_ + ": missing '" + key + "'");
    used_.insert(key);
    return it->second;
  }

  double real(const std::string& key) { return parse_double(raw(key), name_ + "." + key); }
  double real(const std::string& key, double fallback) { return has(key) ? real(key) : fallback; }
  int integer(const std::string& key, int fallback) {
    return has(key) ? parse_int(raw(key), name_ + "." + key) : fallback;
  }

  /// Rejects keys the preset does not understand.
  void finish() const {
    for (const auto& [k, v] : values_)
      if (used_.count(k) == 0) fail(name_ + ": unknown key '" + k + "'");
  }

 private:
  std::string name_;
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

}  // namespace detail

/// Presets `name:key=val,...`:
///   depolarizing:d=2,eps=0.1   dephasing:eps=0.25   ad:eps=0.1
///   gdeph:axis=pi8,eps=0.1 (or nx=,ny=,nz=)        adgen:delta=0.1
/// A template without parameters (e.g. `dephasing`) needs `eps` from the
/// caller; see with_eps. Text starting with '{' is read as noise JSON.
inline NoiseSpec parse_noise(std::string_view text) {
  if (!text.empty() && text.front() == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      detail::fail(std::string("noise JSON: ") + e.what());
    }
    return noise_from_json(j);
  }
  const std::size_t colon = text.find(':');
  const std::string name(text.substr(0, colon));
  detail::KeyValues kv(name, colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1));
  NoiseSpec out;
  if (name == "depolarizing" || name == "dep") {
    out = Depolarizing{kv.integer("d", 2), kv.real("eps")};
  } else if (name == "dephasing" || name == "deph") {
    out = Dephasing{kv.real("eps")};
  } else if (name == "ad" || name == "amplitude_damping") {
    out = AmplitudeDamping{kv.real("eps")};
  } else if (name == "gdeph" || name == "generalized_dephasing") {
    std::array<double, 3> axis{0.0, 0.0, 1.0};
    if (kv.has("axis")) {
      const std::string& a = kv.raw("axis");
      if (a == "pi8") {
        axis = {std::cos(std::numbers::pi / 8), 0.0, std::sin(std::numbers::pi / 8)};
      } else if (a == "x" || a == "y" || a == "z") {
        axis = {a == "x" ? 1.0 : 0.0, a == "y" ? 1.0 : 0.0, a == "z" ? 1.0 : 0.0};
      } else {
        detail::fail("gdeph.axis must be pi8, x, y or z");
      }
    } else {
      axis = {kv.real("nx", 0.0), kv.real("ny", 0.0), kv.real("nz", 1.0)};
    }
    out = GeneralizedDephasing{axis, kv.real("eps")};
  } else if (name == "adgen") {
    out = amplitude_damping_general_form(kv.real(kv.has("delta") ? "delta" : "eps"));
  } else {
    detail::fail("unknown noise preset '" + name + "'");
  }
  kv.finish();
  return out;
}

/// The same preset with its strength replaced (used by sweeps).
inline NoiseSpec with_eps(const NoiseSpec& spec, double eps) {
  return std::visit(
      [eps](auto s) -> NoiseSpec {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, GeneralNoise>) {
          throw Error(Errc::invalid_spec, "general noise has no single strength to sweep");
        } else {
          s.eps = eps;
          return s;
        }
      },
      spec);
}

/// Parses `name` or `name:key=val,...` where eps may be missing; a missing eps
/// is set to zero so the template can be swept.
inline NoiseSpec parse_noise_template(std::string_view text) {
  if (text.find("eps") != std::string_view::npos || text.find('{') != std::string_view::npos) return parse_noise(text);
  std::string patched(text);
  patched += patched.find(':') == std::string::npos ? ":eps=0" : ",eps=0";
  return parse_noise(patched);
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) detail::fail("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    detail::fail(path + ": " + e.what());
  }
}

// Circuits: {"dim":d,"input":Matrix,"gates":[Matrix,...],"observable":Matrix}.

inline Circuit circuit_from_json(const json& j) {
  Circuit c;
  c.dim = detail::count(detail::field(j, "dim"), "dim");
  c.input_state = matrix_from_json(detail::field(j, "input"));
  c.observable = matrix_from_json(detail::field(j, "observable"));
  const json& gates = detail::field(j, "gates");
  if (!gates.is_array()) detail::fail("gates must be an array");
  int k = 0;
  for (const auto& g : gates) {
    const ComplexMatrix u = matrix_from_json(g);
    if (u.rows() != c.dim || u.cols() != c.dim) throw Error(Errc::invalid_dimension, "gate dimension mismatch");
    if (!is_unitary(u, 1e-10)) throw Error(Errc::invalid_input, "gate " + std::to_string(k) + " is not unitary");
    c.gates.push_back(unitary_channel(u, "U" + std::to_string(++k)));
  }
  validate_circuit(c);
  return c;
}

inline json to_json(const Circuit& c) {
  json gates = json::array();
  for (const auto& g : c.gates) {
    if (g.kraus().size() != 1) throw Error(Errc::invalid_input, "circuit gates must be unitary");
    gates.push_back(to_json(g.kraus().front()));
  }
  return {{"dim", c.dim}, {"input", to_json(c.input_state)}, {"gates", std::move(gates)},
          {"observable", to_json(c.observable)}};
}

// Reports.

inline json to_json(const QuasiDecomposition& dec) {
  json terms = json::array();
  for (const auto& t : dec.terms()) terms.push_back({{"eta", t.eta}, {"label", t.label}});
  json j{{"gamma", dec.gamma()}, {"terms", std::move(terms)}};
  if (!std::isnan(dec.residual())) j["residual"] = dec.residual();
  return j;
}

inline json to_json(const BoundsReport& r) {
  json j{{"lower", r.lower}, {"upper", r.upper}, {"method_lower", r.method_lower}, {"method_upper", r.method_upper}};
  if (r.decomposition) j["decomposition"] = to_json(*r.decomposition);
  if (r.witness) j["witness"] = {{"construction", r.witness->construction}, {"y", to_json(r.witness->y)}};
  return j;
}

inline json to_json(const PecResult& r) {
  return {{"estimate", r.estimate},   {"std_error", r.std_error}, {"gamma_tot", r.gamma_tot},
          {"n_samples", r.n_samples}, {"seed", r.seed},           {"truncated_draws", r.truncated_draws}};
}

inline json to_json(const WitnessCheckReport& r) {
  return {{"min_val", r.min_val}, {"max_val", r.max_val}, {"violations", r.violations},
          {"n_samples", r.n_samples}, {"seed", r.seed}};
}

inline json to_json(const BasisSet& b) {
  json elements = json::array();
  for (const auto& e : b.elements) elements.push_back(to_json(e));
  return {{"name", b.name}, {"dim", b.dim}, {"elements", std::move(elements)}};
}

}  // namespace qpec::io
