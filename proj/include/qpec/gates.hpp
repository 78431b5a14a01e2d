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

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "qpec/channel.hpp"

namespace qpec::gates {

inline const Complex kI{0.0, 1.0};

inline ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline ComplexMatrix identity(int d = 2) { return ComplexMatrix::Identity(d, d); }
inline ComplexMatrix pauli_x() { return mat2(0, 1, 1, 0); }
inline ComplexMatrix pauli_y() { return mat2(0, -kI, kI, 0); }
inline ComplexMatrix pauli_z() { return mat2(1, 0, 0, -1); }
inline ComplexMatrix hadamard() { return mat2(1, 1, 1, -1) / std::numbers::sqrt2; }
inline ComplexMatrix phase_s() { return mat2(1, 0, 0, kI); }
inline ComplexMatrix t_gate() { return mat2(1, 0, 0, std::exp(kI * (std::numbers::pi / 4))); }
/// K = S H cycles the Paulis: K^dag X K = Y, K^dag Y K = Z, K^dag Z K = X.
inline ComplexMatrix k_gate() { return phase_s() * hadamard(); }
/// (I + Z)/2, the projection onto |0>.
inline ComplexMatrix projector0() { return mat2(1, 0, 0, 0); }

inline ComplexVector ket(std::initializer_list<Complex> amplitudes) {
  ComplexVector v(static_cast<Eigen::Index>(amplitudes.size()));
  Eigen::Index i = 0;
  for (auto a : amplitudes) v(i++) = a;
  return v;
}
inline ComplexVector ket0() { return ket({1, 0}); }
inline ComplexVector ket1() { return ket({0, 1}); }
inline ComplexVector ket_plus() { return ket({1, 1}) / std::numbers::sqrt2; }
inline ComplexVector ket_plus_y() { return ket({1, kI}) / std::numbers::sqrt2; }

inline ComplexMatrix projector(const ComplexVector& psi) { return psi * psi.adjoint() / psi.squaredNorm(); }

/// |0><0| (x) I + |1><1| (x) U, control on the first (more significant) qubit.
inline ComplexMatrix controlled(const ComplexMatrix& u) {
  return kron(projector(ket0()), identity(2)) + kron(projector(ket1()), u);
}
inline ComplexMatrix cnot() { return controlled(pauli_x()); }
inline ComplexMatrix swap() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
  return m;
}
/// |00><00| + i|10><01| + i|01><10| + |11><11|.
inline ComplexMatrix iswap() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = m(3, 3) = 1.0;
  m(2, 1) = m(1, 2) = kI;
  return m;
}

/// n.sigma for a (not necessarily normalized) axis.
inline ComplexMatrix axis_pauli(double nx, double ny, double nz) {
  return nx * pauli_x() + ny * pauli_y() + nz * pauli_z();
}

/// Unitary error basis on C^d with the identity first. Pauli strings when d
/// is a power of two, clock-and-shift (Weyl) operators otherwise.
inline std::vector<std::pair<std::string, ComplexMatrix>> pauli_basis(int d) {
  if (d < 2) throw Error(Errc::invalid_dimension, "pauli_basis needs d >= 2");
  std::vector<std::pair<std::string, ComplexMatrix>> out;
  if ((d & (d - 1)) == 0) {
    out.emplace_back("", ComplexMatrix::Ones(1, 1));
    const std::pair<std::string, ComplexMatrix> single[] = {
        {"I", identity(2)}, {"X", pauli_x()}, {"Y", pauli_y()}, {"Z", pauli_z()}};
    for (int width = 1; width < d; width *= 2) {
      std::vector<std::pair<std::string, ComplexMatrix>> next;
      for (const auto& [name, m] : out)
        for (const auto& [sname, s] : single) next.emplace_back(name + sname, kron(m, s));
      out = std::move(next);
    }
    return out;
  }
  ComplexMatrix shift = ComplexMatrix::Zero(d, d);
  ComplexMatrix clock = ComplexMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    shift((k + 1) % d, k) = 1.0;
    clock(k, k) = std::exp(kI * (2.0 * std::numbers::pi * k / d));
  }
  ComplexMatrix xa = identity(d);
  for (int a = 0; a < d; ++a) {
    ComplexMatrix zb = identity(d);
    for (int b = 0; b < d; ++b) {
      out.emplace_back("W(" + std::to_string(a) + "," + std::to_string(b) + ")", xa * zb);
      zb = zb * clock;
    }
    xa = xa * shift;
  }
  return out;
}

}  // namespace qpec::gates
