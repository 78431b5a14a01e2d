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

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "qpec/error.hpp"

// Superoperators act on column-stacked operators: vec(X)[i + d*j] = X(i, j).
// Under this convention the map X -> A X B^dagger has superoperator
// conj(B) (x) A. Choi matrices put the reference (input) system first:
// J = sum_ij |i><j| (x) L(|i><j|) = (id (x) L)(d * Phi_d).

namespace qpec {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

namespace tol {
inline constexpr double cptp = 1e-10;
inline constexpr double singular_relative = 1e-12;
inline constexpr double kraus_drop = 1e-12;
inline constexpr double hermitian = 1e-12;
}  // namespace tol

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const ComplexMatrix& m, double tolerance = tol::hermitian) {
  return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tolerance;
}

inline bool is_unitary(const ComplexMatrix& m, double tolerance = 1e-12) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m.adjoint() * m - ComplexMatrix::Identity(m.rows(), m.cols())) <= tolerance;
}

/// Integer square root for superoperator sizes; -1 when n is not a square.
inline int exact_sqrt(Eigen::Index n) {
  auto r = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
  return r * r == n ? static_cast<int>(r) : -1;
}

inline ComplexVector vec(const ComplexMatrix& x) {
  return Eigen::Map<const ComplexVector>(x.data(), x.size());
}

inline ComplexMatrix unvec(const ComplexVector& v, int d) {
  return Eigen::Map<const ComplexMatrix>(v.data(), d, d);
}

/// Phi_d = (1/d) sum_ij |ii><jj|.
inline ComplexMatrix max_entangled(int d) {
  if (d < 2) throw Error(Errc::invalid_dimension, "max_entangled needs d >= 2");
  ComplexVector psi = ComplexVector::Zero(d * d);
  for (int i = 0; i < d; ++i) psi(i * d + i) = 1.0;
  return psi * psi.adjoint() / static_cast<double>(d);
}

/// A linear map on d x d operators with no positivity or trace claims.
class LinearMap {
 public:
  LinearMap(ComplexMatrix superop, std::string label) : superop_(std::move(superop)), label_(std::move(label)) {
    dim_ = exact_sqrt(superop_.rows());
    if (superop_.rows() != superop_.cols() || dim_ < 1)
      throw Error(Errc::invalid_input, "superoperator must be d^2 x d^2");
  }

  int dim() const noexcept { return dim_; }
  const ComplexMatrix& superop() const noexcept { return superop_; }
  const std::string& label() const noexcept { return label_; }

 protected:
  ComplexMatrix superop_;
  std::string label_;
  int dim_ = 0;
};

/// A completely positive map given by its Kraus operators. Trace preservation
/// is not implied (projections such as pi_z are channels here).
class Channel : public LinearMap {
 public:
  Channel(std::vector<ComplexMatrix> kraus, std::string label)
      : LinearMap(superop_of_kraus(kraus), std::move(label)), kraus_(std::move(kraus)) {}

  const std::vector<ComplexMatrix>& kraus() const noexcept { return kraus_; }

  Channel relabeled(std::string label) const { return Channel(kraus_, std::move(label)); }

 private:
  static ComplexMatrix superop_of_kraus(const std::vector<ComplexMatrix>& kraus) {
    if (kraus.empty()) throw Error(Errc::invalid_input, "empty Kraus list");
    const auto d = kraus.front().rows();
    ComplexMatrix s = ComplexMatrix::Zero(d * d, d * d);
    for (const auto& k : kraus) {
      if (k.rows() != d || k.cols() != d)
        throw Error(Errc::invalid_input, "Kraus operators must be square with a common dimension");
      s += kron(k.conjugate(), k);
    }
    return s;
  }

  std::vector<ComplexMatrix> kraus_;
};

inline Channel channel_from_kraus(std::vector<ComplexMatrix> kraus, std::string label) {
  return Channel(std::move(kraus), std::move(label));
}

inline Channel unitary_channel(const ComplexMatrix& u, std::string label) {
  return Channel({u}, std::move(label));
}

inline Channel identity_channel(int d) {
  return unitary_channel(ComplexMatrix::Identity(d, d), "id");
}

/// Replacement channel rho -> Tr[rho] |psi><psi|.
inline Channel preparation_channel(const ComplexVector& psi, std::string label) {
  const auto d = psi.size();
  ComplexVector unit = psi / psi.norm();
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    ComplexMatrix k = ComplexMatrix::Zero(d, d);
    k.col(i) = unit;
    kraus.push_back(std::move(k));
  }
  return Channel(std::move(kraus), std::move(label));
}

inline ComplexMatrix apply(const LinearMap& map, const ComplexMatrix& rho) {
  if (rho.rows() != map.dim() || rho.cols() != map.dim())
    throw Error(Errc::invalid_dimension, "operator does not match map dimension");
  return unvec(map.superop() * vec(rho), map.dim());
}

inline ComplexMatrix choi(const LinearMap& map) {
  const int d = map.dim();
  const auto& s = map.superop();
  ComplexMatrix j(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int jj = 0; jj < d; ++jj)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) j(i * d + a, jj * d + b) = s(a + d * b, i + d * jj);
  return j;
}

inline ComplexMatrix superop_from_choi(const ComplexMatrix& j) {
  const int d = exact_sqrt(j.rows());
  if (d < 1 || j.rows() != j.cols()) throw Error(Errc::invalid_input, "Choi matrix must be d^2 x d^2");
  ComplexMatrix s(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int jj = 0; jj < d; ++jj)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) s(a + d * b, i + d * jj) = j(i * d + a, jj * d + b);
  return s;
}

/// Tr_B of a Choi matrix; equals the identity iff the map is trace preserving.
inline ComplexMatrix partial_trace_output(const ComplexMatrix& j, int d) {
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int jj = 0; jj < d; ++jj)
      for (int a = 0; a < d; ++a) out(i, jj) += j(i * d + a, jj * d + a);
  return out;
}

/// Kraus decomposition from the Choi spectrum; eigenvalues below the drop
/// threshold are discarded. Fails when the Choi matrix is not PSD.
inline Channel channel_from_choi(const ComplexMatrix& j, std::string label, double tolerance = tol::cptp) {
  const int d = exact_sqrt(j.rows());
  if (d < 1 || j.rows() != j.cols()) throw Error(Errc::invalid_input, "Choi matrix must be d^2 x d^2");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (j + j.adjoint()));
  const auto& values = eig.eigenvalues();
  if (values.minCoeff() < -tolerance)
    throw Error(Errc::invalid_input, "Choi matrix is not positive semidefinite");
  std::vector<ComplexMatrix> kraus;
  for (Eigen::Index m = values.size() - 1; m >= 0; --m) {
    if (values(m) <= tol::kraus_drop) continue;
    ComplexVector v = std::sqrt(values(m)) * eig.eigenvectors().col(m);
    ComplexMatrix k(d, d);
    for (int i = 0; i < d; ++i)
      for (int a = 0; a < d; ++a) k(a, i) = v(i * d + a);
    kraus.push_back(std::move(k));
  }
  if (kraus.empty()) kraus.push_back(ComplexMatrix::Zero(d, d));
  return Channel(std::move(kraus), std::move(label));
}

/// a after b: (a o b)(X) = a(b(X)).
inline LinearMap compose(const LinearMap& a, const LinearMap& b) {
  if (a.dim() != b.dim()) throw Error(Errc::invalid_dimension, "compose: dimension mismatch");
  return LinearMap(a.superop() * b.superop(), a.label() + "∘" + b.label());
}

inline Channel compose(const Channel& a, const Channel& b) {
  if (a.dim() != b.dim()) throw Error(Errc::invalid_dimension, "compose: dimension mismatch");
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(a.kraus().size() * b.kraus().size());
  for (const auto& ka : a.kraus())
    for (const auto& kb : b.kraus()) kraus.push_back(ka * kb);
  return Channel(std::move(kraus), a.label() + "∘" + b.label());
}

/// Superoperator of a (x) b acting on the composite system, first factor
/// being the more significant index.
inline LinearMap tensor(const LinearMap& a, const LinearMap& b) {
  const int da = a.dim();
  const int db = b.dim();
  const int dd = da * db;
  const auto& sa = a.superop();
  const auto& sb = b.superop();
  ComplexMatrix s(dd * dd, dd * dd);
  for (int a1 = 0; a1 < da; ++a1)
    for (int b1 = 0; b1 < da; ++b1)
      for (int i1 = 0; i1 < da; ++i1)
        for (int j1 = 0; j1 < da; ++j1) {
          const Complex fa = sa(a1 + da * b1, i1 + da * j1);
          for (int a2 = 0; a2 < db; ++a2)
            for (int b2 = 0; b2 < db; ++b2)
              for (int i2 = 0; i2 < db; ++i2)
                for (int j2 = 0; j2 < db; ++j2) {
                  const int row = (a1 * db + a2) + dd * (b1 * db + b2);
                  const int col = (i1 * db + i2) + dd * (j1 * db + j2);
                  s(row, col) = fa * sb(a2 + db * b2, i2 + db * j2);
                }
        }
  return LinearMap(std::move(s), a.label() + "⊗" + b.label());
}

inline Channel tensor(const Channel& a, const Channel& b) {
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(a.kraus().size() * b.kraus().size());
  for (const auto& ka : a.kraus())
    for (const auto& kb : b.kraus()) kraus.push_back(kron(ka, kb));
  return Channel(std::move(kraus), a.label() + "⊗" + b.label());
}

/// Hilbert-Schmidt adjoint: Tr[A^dagger L(B)] = Tr[adjoint(L)(A)^dagger B].
inline LinearMap adjoint(const LinearMap& map) {
  return LinearMap(map.superop().adjoint(), map.label() + "†");
}

/// Smallest singular value over largest, the quantity compared against the
/// invertibility threshold.
inline double relative_min_singular_value(const LinearMap& map) {
  Eigen::JacobiSVD<ComplexMatrix> svd(map.superop());
  const auto& sv = svd.singularValues();
  if (sv(0) == 0.0) return 0.0;
  return sv(sv.size() - 1) / sv(0);
}

inline LinearMap inverse(const LinearMap& map) {
  if (relative_min_singular_value(map) <= tol::singular_relative)
    throw Error(Errc::non_invertible_channel, "superoperator of '" + map.label() + "' is singular");
  return LinearMap(map.superop().inverse(), map.label() + "⁻¹");
}

/// Real linear combination sum_k c_k L_k of maps on a common dimension.
inline LinearMap linear_combination(const std::vector<std::pair<double, const LinearMap*>>& terms,
                                    std::string label) {
  if (terms.empty()) throw Error(Errc::invalid_input, "empty linear combination");
  const int d = terms.front().second->dim();
  ComplexMatrix s = ComplexMatrix::Zero(d * d, d * d);
  for (const auto& [c, m] : terms) {
    if (m->dim() != d) throw Error(Errc::invalid_dimension, "linear combination: dimension mismatch");
    s += c * m->superop();
  }
  return LinearMap(std::move(s), std::move(label));
}

struct CptpReport {
  bool cp = false;
  bool tp = false;
  double min_choi_eigenvalue = 0.0;
  double tp_deviation = 0.0;
};

inline CptpReport is_cptp(const LinearMap& map, double tolerance = tol::cptp) {
  const ComplexMatrix j = choi(map);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (j + j.adjoint()), Eigen::EigenvaluesOnly);
  CptpReport report;
  report.min_choi_eigenvalue = eig.eigenvalues().minCoeff();
  report.tp_deviation =
      max_abs(partial_trace_output(j, map.dim()) - ComplexMatrix::Identity(map.dim(), map.dim()));
  report.cp = is_hermitian(j, tolerance) && report.min_choi_eigenvalue >= -tolerance;
  report.tp = report.tp_deviation <= tolerance;
  return report;
}

}  // namespace qpec
