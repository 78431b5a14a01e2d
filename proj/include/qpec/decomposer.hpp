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
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "qpec/channel.hpp"
#include "qpec/simplex.hpp"

namespace qpec {

struct QuasiTerm {
  double eta = 0.0;
  Channel op;
  std::string label;
};

/// target = sum_a eta_a O_a, with the sampling cost gamma = sum_a |eta_a|.
class QuasiDecomposition {
 public:
  QuasiDecomposition() = default;
  explicit QuasiDecomposition(std::vector<QuasiTerm> terms,
                              double residual = std::numeric_limits<double>::quiet_NaN())
      : terms_(std::move(terms)), residual_(residual) {
    for (const auto& t : terms_) gamma_ += std::abs(t.eta);
  }

  const std::vector<QuasiTerm>& terms() const noexcept { return terms_; }
  double gamma() const noexcept { return gamma_; }
  /// Reconstruction residual when the producer computed one, NaN otherwise.
  double residual() const noexcept { return residual_; }

  double eta_sum() const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.eta;
    return s;
  }

  /// Total weight of the negative coefficients (gamma = 2 s + 1 when the
  /// coefficients sum to one).
  double negative_weight() const {
    double s = 0.0;
    for (const auto& t : terms_)
      if (t.eta < 0.0) s -= t.eta;
    return s;
  }

  LinearMap reconstruct() const {
    if (terms_.empty()) throw Error(Errc::invalid_input, "empty decomposition");
    const int d = terms_.front().op.dim();
    ComplexMatrix s = ComplexMatrix::Zero(d * d, d * d);
    for (const auto& t : terms_) s += t.eta * t.op.superop();
    return LinearMap(std::move(s), "sum");
  }

 private:
  std::vector<QuasiTerm> terms_;
  double gamma_ = 0.0;
  double residual_ = std::numeric_limits<double>::quiet_NaN();
};

/// max |sum eta_i S(O_i) - S(target)|.
inline double validate(const QuasiDecomposition& dec, const LinearMap& target) {
  const LinearMap sum = dec.reconstruct();
  if (sum.dim() != target.dim()) throw Error(Errc::invalid_dimension, "validate: dimension mismatch");
  return max_abs(sum.superop() - target.superop());
}

/// {noise o B} for every basis element, labeled "E∘B".
inline std::vector<Channel> noisy_basis(const Channel& noise, const std::vector<Channel>& basis) {
  std::vector<Channel> out;
  out.reserve(basis.size());
  for (const auto& b : basis) out.push_back(compose(noise, b));
  return out;
}

namespace detail {

/// Real equality system for sum_a eta_a S(O_a) = S(target): real and
/// imaginary parts of every superoperator entry stacked.
struct RealSystem {
  Eigen::MatrixXd m;
  Eigen::VectorXd rhs;
};

inline RealSystem real_system(const LinearMap& target, const std::vector<Channel>& ops) {
  if (ops.empty()) throw Error(Errc::invalid_input, "empty candidate set");
  const Eigen::Index len = target.superop().size();
  RealSystem sys{Eigen::MatrixXd(2 * len, static_cast<Eigen::Index>(ops.size())), Eigen::VectorXd(2 * len)};
  for (std::size_t a = 0; a < ops.size(); ++a) {
    if (ops[a].dim() != target.dim()) throw Error(Errc::invalid_dimension, "candidate dimension mismatch");
    const ComplexVector v = vec(ops[a].superop());
    sys.m.col(static_cast<Eigen::Index>(a)) << v.real(), v.imag();
  }
  const ComplexVector t = vec(target.superop());
  sys.rhs << t.real(), t.imag();
  return sys;
}

inline QuasiDecomposition assemble(const Eigen::VectorXd& eta, const std::vector<Channel>& ops,
                                   const LinearMap& target) {
  std::vector<QuasiTerm> terms;
  terms.reserve(ops.size());
  for (std::size_t a = 0; a < ops.size(); ++a)
    terms.push_back({eta(static_cast<Eigen::Index>(a)), ops[a], ops[a].label()});
  QuasiDecomposition draft(terms);
  return QuasiDecomposition(std::move(terms), validate(draft, target));
}

inline constexpr double span_tol = 1e-8;
inline constexpr double rank_tol = 1e-9;

}  // namespace detail

/// Unique coefficients of target over a linearly independent basis.
inline QuasiDecomposition decompose_exact(const LinearMap& target, const std::vector<Channel>& basis) {
  const auto sys = detail::real_system(target, basis);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(detail::rank_tol);
  if (svd.rank() < sys.m.cols())
    throw Error(Errc::rank_deficient_basis,
                "basis rank " + std::to_string(svd.rank()) + " < " + std::to_string(sys.m.cols()));
  const Eigen::VectorXd eta = svd.solve(sys.rhs);
  auto dec = detail::assemble(eta, basis, target);
  if (!(dec.residual() <= detail::span_tol))
    throw Error(Errc::target_outside_span, "least-squares residual " + std::to_string(dec.residual()));
  return dec;
}

/// Minimum-L1 coefficients of target over a (possibly overcomplete)
/// candidate set, via the split-variable LP
///   min 1.(p + n)  s.t.  M (p - n) = t,  p, n >= 0.
/// Redundant equalities are projected out with a rank-revealing SVD first.
inline QuasiDecomposition decompose_l1(const LinearMap& target, const std::vector<Channel>& candidates,
                                       const lp::SimplexOptions& options = {}) {
  const auto sys = detail::real_system(target, candidates);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(detail::rank_tol);
  const Eigen::Index r = svd.rank();
  if (r == 0) throw Error(Errc::rank_deficient_basis, "candidate set spans nothing");
  const Eigen::MatrixXd ur = svd.matrixU().leftCols(r);
  const Eigen::VectorXd projected = ur.transpose() * sys.rhs;
  if ((ur * projected - sys.rhs).cwiseAbs().maxCoeff() > detail::span_tol)
    throw Error(Errc::target_outside_span, "target is not in the span of the candidates");

  const Eigen::Index n = sys.m.cols();
  // Row-space form: diag(s_r) V_r^T eta = U_r^T t.
  const Eigen::MatrixXd reduced =
      svd.singularValues().head(r).asDiagonal() * svd.matrixV().leftCols(r).transpose();
  Eigen::MatrixXd a(r, 2 * n);
  a << reduced, -reduced;
  const Eigen::VectorXd cost = Eigen::VectorXd::Ones(2 * n);

  // Any r independent columns give a feasible start once each takes the sign
  // of its coefficient, so phase one is unnecessary.
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(reduced);
  const auto& perm = qr.colsPermutation().indices();
  Eigen::MatrixXd b(r, r);
  for (Eigen::Index k = 0; k < r; ++k) b.col(k) = reduced.col(perm(k));
  const Eigen::VectorXd xb = b.partialPivLu().solve(projected);
  std::vector<int> start(static_cast<std::size_t>(r));
  for (Eigen::Index k = 0; k < r; ++k)
    start[static_cast<std::size_t>(k)] = static_cast<int>(xb(k) >= 0.0 ? perm(k) : n + perm(k));
  const auto sol = lp::solve_from_basis(a, projected, cost, std::move(start), options);
  const Eigen::VectorXd eta = sol.x.head(n) - sol.x.tail(n);
  return detail::assemble(eta, candidates, target);
}

}  // namespace qpec
