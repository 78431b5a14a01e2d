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
#include <string>
#include <utility>
#include <vector>

#include "qpec/channel.hpp"
#include "qpec/gates.hpp"

namespace qpec {

/// A named, ordered set of maps. Order is frozen so coefficient vectors are
/// reproducible.
struct BasisSet {
  std::string name;
  int dim = 2;
  std::vector<Channel> elements;
};

/// Numerical rank of the stacked vectorized Choi matrices, counting singular
/// values above relative_threshold * sigma_max.
template <typename MapT>
int rank_of(const std::vector<MapT>& maps, double relative_threshold = 1e-9) {
  if (maps.empty()) throw Error(Errc::invalid_input, "rank_of needs at least one map");
  const int d = maps.front().dim();
  const int len = d * d * d * d;
  ComplexMatrix rows(static_cast<Eigen::Index>(maps.size()), len);
  for (std::size_t k = 0; k < maps.size(); ++k) {
    if (maps[k].dim() != d) throw Error(Errc::invalid_dimension, "rank_of: mixed dimensions");
    rows.row(static_cast<Eigen::Index>(k)) = vec(choi(maps[k])).transpose();
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(rows);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > relative_threshold * sv(0)) ++rank;
  return rank;
}

namespace detail {

inline Channel labeled_unitary(const std::string& name, const ComplexMatrix& u) {
  return unitary_channel(u, name);
}

inline Channel labeled_kraus(const std::string& name, const ComplexMatrix& k) {
  return channel_from_kraus({k}, name);
}

/// The ten Clifford unitaries shared by Tables I and II, as gate matrices.
/// Channel composition A o B corresponds to the matrix product A B.
inline std::vector<std::pair<std::string, ComplexMatrix>> clifford_ten() {
  using namespace gates;
  const ComplexMatrix k = k_gate();
  const ComplexMatrix kd = k.adjoint();
  const ComplexMatrix sd = phase_s().adjoint();
  return {
      {"id", identity()},
      {"X", pauli_x()},
      {"Y", pauli_y()},
      {"Z", pauli_z()},
      {"K†S†K", kd * sd * k},
      {"KS†K†", k * sd * kd},
      {"S†", sd},
      {"KHK†", k * hadamard() * kd},
      {"H", hadamard()},
      {"K†HK", kd * hadamard() * k},
  };
}

}  // namespace detail

/// Sixteen Clifford unitaries and trace-nonincreasing projections spanning
/// all linear maps on a qubit.
inline BasisSet basis_b16() {
  using namespace gates;
  BasisSet set{"b16", 2, {}};
  int index = 1;
  for (const auto& [name, u] : detail::clifford_ten())
    set.elements.push_back(detail::labeled_unitary("B" + std::to_string(index++) + ":" + name, u));
  const ComplexMatrix k = k_gate();
  const ComplexMatrix kd = k.adjoint();
  const ComplexMatrix p0 = projector0();
  const ComplexMatrix x = pauli_x();
  set.elements.push_back(detail::labeled_kraus("B11:K†πzK", kd * p0 * k));
  set.elements.push_back(detail::labeled_kraus("B12:KπzK†", k * p0 * kd));
  set.elements.push_back(detail::labeled_kraus("B13:πz", p0));
  set.elements.push_back(detail::labeled_kraus("B14:K†πzXK", kd * p0 * x * k));
  set.elements.push_back(detail::labeled_kraus("B15:KπzXK†", k * p0 * x * kd));
  set.elements.push_back(detail::labeled_kraus("B16:πzX", p0 * x));
  return set;
}

/// Thirteen CPTP maps (ten unitaries, three preparations) spanning the
/// trace-preserving maps on a qubit.
inline BasisSet basis_b13() {
  using namespace gates;
  BasisSet set{"b13", 2, {}};
  int index = 1;
  for (const auto& [name, u] : detail::clifford_ten())
    set.elements.push_back(detail::labeled_unitary("B" + std::to_string(index++) + ":" + name, u));
  set.elements.push_back(preparation_channel(ket_plus(), "B11:P|+>"));
  set.elements.push_back(preparation_channel(ket_plus_y(), "B12:P|+y>"));
  set.elements.push_back(preparation_channel(ket0(), "B13:P|0>"));
  return set;
}

namespace detail {

struct Conjugator {
  std::string name;
  ComplexMatrix v;
};

/// Local conjugations V = V1 (x) V2 with V1 drawn from `first` and V2 from
/// `second`, each a subset of {I, K, K^dag}.
inline std::vector<Conjugator> conjugators(const std::vector<int>& first, const std::vector<int>& second) {
  const ComplexMatrix k = gates::k_gate();
  const std::array<ComplexMatrix, 3> options{gates::identity(), k, ComplexMatrix(k.adjoint())};
  const std::array<std::string, 3> names{"I", "K", "K†"};
  std::vector<Conjugator> out;
  for (int a : first)
    for (int b : second) out.push_back({names[a] + "⊗" + names[b], kron(options[a], options[b])});
  return out;
}

}  // namespace detail

/// 241 CPTP maps spanning the trace-preserving maps on two qubits: all
/// pairwise tensor products of basis_b13 followed by 72 entangling unitaries
/// conjugated by local K gates (V^dag U V).
///
/// Conjugation sets per row: "K_{1,2}, K_{1,2}^dag" is {I,K,K^dag}^(x)2 (nine);
/// SWAP uses I (x) {I,K,K^dag} (three); iSWAP uses {I,K} (x) {I,K,K^dag} (six).
inline BasisSet basis_two_qubit_241() {
  using namespace gates;
  BasisSet set{"tq241", 4, {}};
  const BasisSet single = basis_b13();
  for (const auto& a : single.elements)
    for (const auto& b : single.elements) set.elements.push_back(tensor(a, b));

  const ComplexMatrix x1 = kron(pauli_x(), identity());
  const ComplexMatrix h1 = kron(hadamard(), identity());
  const ComplexVector h_plus = ket({std::cos(std::numbers::pi / 8), std::sin(std::numbers::pi / 8)});
  const ComplexVector h_minus = ket({-std::sin(std::numbers::pi / 8), std::cos(std::numbers::pi / 8)});
  const ComplexMatrix ch_x = kron(projector(h_plus), identity()) + kron(projector(h_minus), pauli_x());

  const std::vector<int> all{0, 1, 2};
  const auto nine = detail::conjugators(all, all);
  const auto swap_set = detail::conjugators({0}, all);
  const auto iswap_set = detail::conjugators({0, 1}, all);

  struct Row {
    std::string name;
    ComplexMatrix u;
    const std::vector<detail::Conjugator>* conj;
  };
  const std::vector<Row> rows{
      {"CX", cnot(), &nine},
      {"X1·CX·X1", x1 * cnot() * x1, &nine},
      {"CS", controlled(phase_s()), &nine},
      {"CH", controlled(hadamard()), &nine},
      {"C_H X", ch_x, &nine},
      {"CX·H1", cnot() * h1, &nine},
      {"SW", swap(), &swap_set},
      {"iSW", iswap(), &iswap_set},
      {"SW·H1", swap() * h1, &nine},
  };
  for (const auto& row : rows)
    for (const auto& c : *row.conj)
      set.elements.push_back(unitary_channel(c.v.adjoint() * row.u * c.v, row.name + "[" + c.name + "]"));
  int index = 1;
  for (auto& e : set.elements) e = e.relabeled("B" + std::to_string(index++) + ":" + e.label());
  return set;
}

/// "b16", "b13" or "tq241".
inline BasisSet basis_by_name(const std::string& name) {
  if (name == "b16") return basis_b16();
  if (name == "b13") return basis_b13();
  if (name == "tq241") return basis_two_qubit_241();
  throw Error(Errc::invalid_input, "unknown basis '" + name + "' (expected b16, b13 or tq241)");
}

}  // namespace qpec
