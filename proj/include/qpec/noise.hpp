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

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>

#include "qpec/channel.hpp"
#include "qpec/gates.hpp"

namespace qpec {

/// D(rho) = (1 - eps) rho + eps I/d.
struct Depolarizing {
  int d = 2;
  double eps = 0.0;
};

/// F(rho) = (1 - eps) rho + eps Z rho Z.
struct Dephasing {
  double eps = 0.0;
};

/// (1 - eps) rho + eps R rho R^dag with R = exp(i n.sigma pi/2) = i n.sigma.
struct GeneralizedDephasing {
  std::array<double, 3> axis{0.0, 0.0, 1.0};
  double eps = 0.0;
};

/// Kraus A0 = |0><0| + sqrt(1-eps)|1><1|, A1 = sqrt(eps)|0><1|.
struct AmplitudeDamping {
  double eps = 0.0;
};

/// E = (1 - eps) id + eps_plus * Lambda - eps_minus * Xi with Lambda, Xi
/// programmable (mixtures of unitaries and state preparations).
struct GeneralNoise {
  double eps = 0.0;
  double eps_plus = 0.0;
  double eps_minus = 0.0;
  Channel lambda = identity_channel(2);
  Channel xi = identity_channel(2);
};

using NoiseSpec = std::variant<Depolarizing, Dephasing, GeneralizedDephasing, AmplitudeDamping, GeneralNoise>;

namespace detail {
inline void check_probability(double eps, const char* what) {
  if (!(eps >= 0.0 && eps <= 1.0))
    throw Error(Errc::invalid_parameter, std::string(what) + ": eps must lie in [0, 1]");
}

inline std::array<double, 3> normalized_axis(const std::array<double, 3>& axis) {
  const double norm = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw Error(Errc::invalid_parameter, "generalized dephasing axis must be a nonzero vector");
  return {axis[0] / norm, axis[1] / norm, axis[2] / norm};
}
}  // namespace detail

/// Convex mixture sum_k p_k C_k as a single channel (Kraus sqrt(p_k) K).
inline Channel mixture(const std::vector<std::pair<double, Channel>>& parts, std::string label) {
  std::vector<ComplexMatrix> kraus;
  for (const auto& [p, ch] : parts) {
    if (p < 0.0) throw Error(Errc::invalid_parameter, "mixture weights must be nonnegative");
    if (p == 0.0) continue;
    for (const auto& k : ch.kraus()) kraus.push_back(std::sqrt(p) * k);
  }
  return Channel(std::move(kraus), std::move(label));
}

/// The rotation part R rho R^dag of the generalized dephasing channel.
inline Channel axis_rotation_channel(const std::array<double, 3>& axis) {
  const auto n = detail::normalized_axis(axis);
  return unitary_channel(gates::axis_pauli(n[0], n[1], n[2]), "R_n");
}

/// Superoperator (1 - eps) id + eps_plus Lambda - eps_minus Xi.
inline LinearMap general_form_map(const GeneralNoise& g) {
  const int d = g.lambda.dim();
  if (g.xi.dim() != d) throw Error(Errc::invalid_spec, "Lambda and Xi must share a dimension");
  ComplexMatrix s = (1.0 - g.eps) * ComplexMatrix::Identity(d * d, d * d) + g.eps_plus * g.lambda.superop() -
                    g.eps_minus * g.xi.superop();
  return LinearMap(std::move(s), "E_general");
}

inline Channel make_noise(const NoiseSpec& spec) {
  return std::visit(
      [](const auto& s) -> Channel {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Depolarizing>) {
          if (s.d < 2) throw Error(Errc::invalid_dimension, "depolarizing needs d >= 2");
          detail::check_probability(s.eps, "depolarizing");
          const double d2 = static_cast<double>(s.d) * s.d;
          auto basis = gates::pauli_basis(s.d);
          std::vector<ComplexMatrix> kraus;
          kraus.push_back(std::sqrt(1.0 - s.eps + s.eps / d2) * basis.front().second);
          if (s.eps > 0.0)
            for (std::size_t k = 1; k < basis.size(); ++k) kraus.push_back(std::sqrt(s.eps / d2) * basis[k].second);
          return Channel(std::move(kraus), "D");
        } else if constexpr (std::is_same_v<T, Dephasing>) {
          detail::check_probability(s.eps, "dephasing");
          return Channel({std::sqrt(1.0 - s.eps) * gates::identity(), std::sqrt(s.eps) * gates::pauli_z()}, "F");
        } else if constexpr (std::is_same_v<T, GeneralizedDephasing>) {
          detail::check_probability(s.eps, "generalized dephasing");
          const auto n = detail::normalized_axis(s.axis);
          return Channel({std::sqrt(1.0 - s.eps) * gates::identity(),
                          std::sqrt(s.eps) * gates::axis_pauli(n[0], n[1], n[2])},
                         "F_n");
        } else if constexpr (std::is_same_v<T, AmplitudeDamping>) {
          detail::check_probability(s.eps, "amplitude damping");
          ComplexMatrix a0 = gates::mat2(1, 0, 0, std::sqrt(1.0 - s.eps));
          ComplexMatrix a1 = gates::mat2(0, std::sqrt(s.eps), 0, 0);
          return Channel({a0, a1}, "A");
        } else {
          if (!(s.eps >= 0.0 && s.eps <= 1.0 && s.eps_plus >= 0.0 && s.eps_minus >= 0.0))
            throw Error(Errc::invalid_parameter, "general noise needs 0 <= eps <= 1 and eps_plus, eps_minus >= 0");
          const LinearMap e = general_form_map(s);
          const auto report = is_cptp(e);
          if (!report.tp) throw Error(Errc::invalid_spec, "general noise reconstruction is not trace preserving");
          if (!report.cp) throw Error(Errc::invalid_spec, "general noise reconstruction is not completely positive");
          return channel_from_choi(choi(e), "E");
        }
      },
      spec);
}

/// (eps, eps_plus, eps_minus, Lambda, Xi) for amplitude damping with strength
/// delta: Lambda prepares |0>, Xi is Z conjugation.
inline GeneralNoise amplitude_damping_general_form(double delta) {
  detail::check_probability(delta, "amplitude damping");
  const double root = std::sqrt(1.0 - delta);
  GeneralNoise g;
  g.eps = (1.0 + delta - root) / 2.0;
  g.eps_plus = delta;
  g.eps_minus = (root - (1.0 - delta)) / 2.0;
  g.lambda = preparation_channel(gates::ket0(), "P_|0>");
  g.xi = unitary_channel(gates::pauli_z(), "Z");
  return g;
}

/// A representation of every built-in noise in the general form. Pauli-type
/// noise becomes (1 - eps') id + eps' * (Pauli mixture) with eps_minus = 0.
inline GeneralNoise to_general_form(const NoiseSpec& spec) {
  return std::visit(
      [](const auto& s) -> GeneralNoise {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, GeneralNoise>) {
          return s;
        } else if constexpr (std::is_same_v<T, AmplitudeDamping>) {
          return amplitude_damping_general_form(s.eps);
        } else if constexpr (std::is_same_v<T, Dephasing>) {
          detail::check_probability(s.eps, "dephasing");
          return GeneralNoise{s.eps, s.eps, 0.0, unitary_channel(gates::pauli_z(), "Z"), identity_channel(2)};
        } else if constexpr (std::is_same_v<T, GeneralizedDephasing>) {
          detail::check_probability(s.eps, "generalized dephasing");
          return GeneralNoise{s.eps, s.eps, 0.0, axis_rotation_channel(s.axis), identity_channel(2)};
        } else {
          if (s.d < 2) throw Error(Errc::invalid_dimension, "depolarizing needs d >= 2");
          detail::check_probability(s.eps, "depolarizing");
          const double d2 = static_cast<double>(s.d) * s.d;
          auto basis = gates::pauli_basis(s.d);
          std::vector<std::pair<double, Channel>> parts;
          for (std::size_t k = 1; k < basis.size(); ++k)
            parts.emplace_back(1.0 / (d2 - 1.0), unitary_channel(basis[k].second, basis[k].first));
          const double weight = s.eps * (d2 - 1.0) / d2;
          return GeneralNoise{weight, weight, 0.0, mixture(parts, "Pauli-mix"), identity_channel(s.d)};
        }
      },
      spec);
}

inline int noise_dim(const NoiseSpec& spec) {
  if (const auto* dep = std::get_if<Depolarizing>(&spec)) return dep->d;
  if (const auto* g = std::get_if<GeneralNoise>(&spec)) return g->lambda.dim();
  return 2;
}

inline std::string describe(const NoiseSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&os](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Depolarizing>) {
          os << "depolarizing:d=" << s.d << ",eps=" << s.eps;
        } else if constexpr (std::is_same_v<T, Dephasing>) {
          os << "dephasing:eps=" << s.eps;
        } else if constexpr (std::is_same_v<T, GeneralizedDephasing>) {
          os << "gdeph:nx=" << s.axis[0] << ",ny=" << s.axis[1] << ",nz=" << s.axis[2] << ",eps=" << s.eps;
        } else if constexpr (std::is_same_v<T, AmplitudeDamping>) {
          os << "ad:eps=" << s.eps;
        } else {
          os << "general:eps=" << s.eps << ",eps_plus=" << s.eps_plus << ",eps_minus=" << s.eps_minus
             << ",lambda=" << s.lambda.label() << ",xi=" << s.xi.label();
        }
      },
      spec);
  return os.str();
}

}  // namespace qpec
