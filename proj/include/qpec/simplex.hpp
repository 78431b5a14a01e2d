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
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "qpec/error.hpp"

namespace qpec::lp {

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  double pivot_tol = 1e-10;
  double optimality_tol = 1e-9;
  long max_iterations = 200000;
};

struct SimplexResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  long iterations = 0;
  std::vector<int> basis;
};

namespace detail {

/// Dense tableau: rows 0..m-1 are constraints, row m is the reduced-cost row;
/// the last column is the right-hand side. The original constraint rows are
/// kept so the tableau can be rebuilt from the current basis, which bounds
/// the round-off that accumulates over long pivot sequences.
class Tableau {
 public:
  Tableau(Eigen::MatrixXd constraints, std::vector<int> basis)
      : original_(std::move(constraints)), basis_(std::move(basis)) {
    for (Eigen::Index i = 0; i < original_.rows(); ++i) row_ids_.push_back(i);
    t_ = Eigen::MatrixXd::Zero(original_.rows() + 1, original_.cols());
    t_.topRows(original_.rows()) = original_;
  }

  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index cols() const { return t_.cols() - 1; }
  Eigen::MatrixXd& data() { return t_; }
  std::vector<int>& basis() { return basis_; }

  /// Installs the objective (one entry per non-RHS column) and prices it out.
  void set_cost(Eigen::VectorXd cost) {
    cost_ = std::move(cost);
    price();
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    t_(r, c) = 1.0;
    basis_[static_cast<std::size_t>(r)] = static_cast<int>(c);
  }

  /// Rebuilds B^-1 [A | b] and the cost row from the original data. Leaves
  /// the tableau untouched and returns false when the basis is singular.
  bool reinvert() {
    const auto m = static_cast<Eigen::Index>(basis_.size());
    if (m == 0) return true;
    Eigen::MatrixXd rows_orig(m, original_.cols());
    for (Eigen::Index i = 0; i < m; ++i) rows_orig.row(i) = original_.row(row_ids_[static_cast<std::size_t>(i)]);
    Eigen::MatrixXd b(m, m);
    for (Eigen::Index i = 0; i < m; ++i) b.col(i) = rows_orig.col(basis_[static_cast<std::size_t>(i)]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-13)) return false;
    t_.topRows(m) = lu.solve(rows_orig);
    price();
    return true;
  }

  /// Runs Bland's rule over columns [0, active_cols). Returns false when the
  /// objective is unbounded below.
  bool optimize(Eigen::Index active_cols, const SimplexOptions& opt, long& iterations) {
    constexpr long refresh_every = 128;
    // An improving column without a usable pivot is round-off when its
    // reduced cost is this close to zero; it is skipped until the next pivot.
    constexpr double noise_cost = 1e-7;
    const Eigen::Index m = rows();
    std::vector<char> skipped(static_cast<std::size_t>(active_cols), 0);
    long since_refresh = 0;
    bool fresh = false;
    while (true) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < active_cols; ++j)
        if (!skipped[static_cast<std::size_t>(j)] && t_(m, j) < -opt.optimality_tol) {
          enter = j;
          break;
        }
      Eigen::Index leave = -1;
      if (enter >= 0) leave = ratio_test(enter, opt);
      if (enter < 0 || leave < 0) {
        // Confirm termination on a freshly rebuilt tableau.
        if (!fresh) {
          reinvert();
          fresh = true;
          since_refresh = 0;
          continue;
        }
        if (enter < 0) return true;
        if (t_(m, enter) < -noise_cost) return false;
        skipped[static_cast<std::size_t>(enter)] = 1;
        continue;
      }
      pivot(leave, enter);
      fresh = false;
      std::fill(skipped.begin(), skipped.end(), 0);
      if (++iterations > opt.max_iterations)
        throw Error(Errc::solver_failure, "simplex iteration limit exceeded");
      if (++since_refresh == refresh_every) {
        reinvert();
        since_refresh = 0;
      }
    }
  }

  void drop_row(Eigen::Index r) {
    const Eigen::Index n = t_.rows() - 1;
    if (r < n) t_.block(r, 0, n - r, t_.cols()) = t_.block(r + 1, 0, n - r, t_.cols()).eval();
    t_.conservativeResize(n, Eigen::NoChange);
    basis_.erase(basis_.begin() + r);
    row_ids_.erase(row_ids_.begin() + r);
  }

 private:
  Eigen::Index ratio_test(Eigen::Index enter, const SimplexOptions& opt) const {
    const Eigen::Index m = rows();
    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double a = t_(i, enter);
      if (a <= opt.pivot_tol) continue;
      const double ratio = std::max(0.0, t_(i, cols())) / a;
      if (ratio < best - 1e-12 ||
          (leave >= 0 && std::abs(ratio - best) <= 1e-12 &&
           basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
        best = ratio;
        leave = i;
      }
    }
    return leave;
  }

  void price() {
    const Eigen::Index m = rows();
    t_.row(m).setZero();
    t_.block(m, 0, 1, cost_.size()) = cost_.transpose();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double cb = cost_(basis_[static_cast<std::size_t>(i)]);
      if (cb != 0.0) t_.row(m) -= cb * t_.row(i);
    }
  }

  Eigen::MatrixXd original_;
  Eigen::MatrixXd t_;
  Eigen::VectorXd cost_;
  std::vector<int> basis_;
  std::vector<Eigen::Index> row_ids_;
};

}  // namespace detail

namespace detail {

/// Optimizes c over a tableau holding a feasible basis, then polishes the
/// basic values against the original data.
inline SimplexResult phase_two(Tableau& tab, const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                               const Eigen::VectorXd& c, const SimplexOptions& opt, SimplexResult& result) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  // Artificial columns, when present, carry zero cost and never re-enter.
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(tab.cols());
  cost.head(n) = c;
  tab.set_cost(std::move(cost));
  tab.reinvert();
  if (!tab.optimize(n, opt, result.iterations)) throw Error(Errc::solver_failure, "linear program is unbounded");

  const Eigen::Index rows = tab.rows();
  auto& data = tab.data();
  result.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const int bi = tab.basis()[static_cast<std::size_t>(i)];
    result.x(bi) = std::max(0.0, data(i, data.cols() - 1));
    result.basis.push_back(bi);
  }

  // Recompute basic values from the original data to shed tableau round-off.
  if (!result.basis.empty()) {
    Eigen::MatrixXd ab(m, static_cast<Eigen::Index>(result.basis.size()));
    for (std::size_t k = 0; k < result.basis.size(); ++k)
      ab.col(static_cast<Eigen::Index>(k)) = a.col(result.basis[k]);
    Eigen::VectorXd xb = ab.colPivHouseholderQr().solve(b);
    bool nonnegative = true;
    for (Eigen::Index k = 0; k < xb.size(); ++k)
      if (xb(k) < -opt.feasibility_tol) nonnegative = false;
    if (nonnegative && (ab * xb - b).cwiseAbs().maxCoeff() <= (a * result.x - b).cwiseAbs().maxCoeff()) {
      for (std::size_t k = 0; k < result.basis.size(); ++k)
        result.x(result.basis[k]) = std::max(0.0, xb(static_cast<Eigen::Index>(k)));
    }
  }
  result.objective = c.dot(result.x);
  return result;
}

}  // namespace detail

/// Solves min c.x subject to A x = b, x >= 0 with the two-phase dense primal
/// simplex method and Bland's anti-cycling rule. Deterministic for fixed
/// input. Throws target_outside_span when infeasible and solver_failure when
/// unbounded or out of iterations.
inline SimplexResult solve_standard_form(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                         const Eigen::VectorXd& c, const SimplexOptions& opt = {}) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (b.size() != m || c.size() != n) throw Error(Errc::invalid_input, "simplex: inconsistent shapes");

  // Phase 1 constraints [A | I | b] with artificial basis, rows sign-normalized.
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, n + m + 1);
  std::vector<int> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    t.block(i, 0, 1, n) = sign * a.row(i);
    t(i, n + i) = 1.0;
    t(i, n + m) = sign * b(i);
    basis[static_cast<std::size_t>(i)] = static_cast<int>(n + i);
  }

  detail::Tableau tab(std::move(t), std::move(basis));
  Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(n + m);
  phase1_cost.tail(m).setOnes();
  tab.set_cost(std::move(phase1_cost));
  SimplexResult result;
  if (!tab.optimize(n + m, opt, result.iterations))
    throw Error(Errc::solver_failure, "phase 1 reported unboundedness");
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if (-tab.data()(tab.rows(), tab.cols()) > opt.feasibility_tol * scale)
    throw Error(Errc::target_outside_span, "linear program is infeasible");

  // Pivot artificials out of the basis; rows where that is impossible are
  // redundant and removed.
  for (Eigen::Index r = 0; r < tab.rows();) {
    if (tab.basis()[static_cast<std::size_t>(r)] < n) {
      ++r;
      continue;
    }
    Eigen::Index col = -1;
    double best = std::max(opt.pivot_tol, 1e-9);
    for (Eigen::Index j = 0; j < n; ++j)
      if (std::abs(tab.data()(r, j)) > best) {
        best = std::abs(tab.data()(r, j));
        col = j;
      }
    if (col >= 0) {
      tab.pivot(r, col);
      ++r;
    } else {
      tab.drop_row(r);
    }
  }

  return detail::phase_two(tab, a, b, c, opt, result);
}

/// As solve_standard_form, but starts phase two from a caller-supplied basis
/// (one column index per row). Falls back to the two-phase method when that
/// basis is singular or infeasible.
inline SimplexResult solve_from_basis(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                                      std::vector<int> start, const SimplexOptions& opt = {}) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (b.size() != m || c.size() != n) throw Error(Errc::invalid_input, "simplex: inconsistent shapes");
  if (static_cast<Eigen::Index>(start.size()) == m) {
    Eigen::MatrixXd t(m, n + 1);
    t << a, b;
    detail::Tableau tab(std::move(t), std::move(start));
    tab.set_cost(Eigen::VectorXd::Zero(n));
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    if (tab.reinvert() && tab.data().col(n).head(m).minCoeff() >= -opt.feasibility_tol * scale) {
      SimplexResult result;
      return detail::phase_two(tab, a, b, c, opt, result);
    }
  }
  return solve_standard_form(a, b, c, opt);
}

}  // namespace qpec::lp
