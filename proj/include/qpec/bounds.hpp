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
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qpec/channel.hpp"
#include "qpec/decomposer.hpp"
#include "qpec/gates.hpp"
#include "qpec/noise.hpp"
#include "qpec/random.hpp"
#include "qpec/rng.hpp"

namespace qpec {

/// Hermitian operator Y for the dual robustness problem; a valid witness
/// satisfies 0 <= Tr[Y J_O] <= 1 for every implementable O, and then
/// 2 Tr[Y J_U] - 1 lower-bounds the optimal cost of U.
struct Witness {
  ComplexMatrix y;
  std::string construction;
};

struct BoundsReport {
  double lower = 0.0;
  double upper = 0.0;
  std::string method_lower;
  std::string method_upper;
  std::optional<QuasiDecomposition> decomposition;
  std::optional<Witness> witness;
};

/// Y = d^-2 J[(E^-1)^dag o U].
inline Witness systematic_witness(const LinearMap& noise, const LinearMap& gate) {
  const int d = noise.dim();
  const LinearMap map = compose(adjoint(inverse(noise)), gate);
  const ComplexMatrix y = choi(map) / static_cast<double>(d * d);
  // Hermitian in exact arithmetic; drop the round-off the inverse amplifies.
  return {(y + y.adjoint()) / 2.0, "d^-2 J[(E^-1)^† ∘ U]"};
}

/// 2 Tr[Y J_U] - 1.
inline double lower_bound_from_witness(const Witness& w, const LinearMap& gate) {
  const ComplexMatrix j = choi(gate);
  if (j.rows() != w.y.rows()) throw Error(Errc::invalid_dimension, "witness and gate dimensions differ");
  return 2.0 * (w.y * j).trace().real() - 1.0;
}

/// Tr[Phi_d (id (x) L)(Phi_d)] evaluated through the Choi matrix.
inline double entanglement_overlap(const LinearMap& map) {
  const int d = map.dim();
  return (max_entangled(d) * choi(map)).trace().real() / d;
}

namespace detail {

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

inline Channel gate_or_identity(const Channel* gate, int d) {
  return gate != nullptr ? *gate : identity_channel(d);
}

}  // namespace detail

/// Depolarizing noise: (1 + (1 - 2/d^2) eps)/(1 - eps), tight.
inline BoundsReport gamma_depolarizing(int d, double eps, const Channel* gate = nullptr) {
  detail::require(d >= 2, Errc::invalid_dimension, "depolarizing needs d >= 2");
  detail::require(eps >= 0.0 && eps < 1.0, Errc::invalid_parameter, "depolarizing bounds need 0 <= eps < 1");
  const double d2 = static_cast<double>(d) * d;
  const double value = (1.0 + (1.0 - 2.0 / d2) * eps) / (1.0 - eps);
  const Channel noise = make_noise(Depolarizing{d, eps});
  const Channel u = detail::gate_or_identity(gate, d);

  std::vector<QuasiTerm> terms;
  const double eta0 = 1.0 + (d2 - 1.0) * eps / (d2 * (1.0 - eps));
  const double eta_p = -eps / (d2 * (1.0 - eps));
  const auto paulis = gates::pauli_basis(d);
  terms.push_back({eta0, compose(noise, u), "D∘U"});
  for (std::size_t k = 1; k < paulis.size(); ++k) {
    const Channel p = unitary_channel(paulis[k].second, paulis[k].first);
    terms.push_back({eta_p, compose(noise, compose(p, u)), "D∘" + paulis[k].first + "∘U"});
  }
  BoundsReport r{value, value, "systematic witness", "Pauli decomposition", QuasiDecomposition(std::move(terms)),
                 systematic_witness(noise, u)};
  return r;
}

/// Qubit dephasing: 1/(1 - 2 eps), tight for eps < 1/2.
inline BoundsReport gamma_dephasing(double eps, const Channel* gate = nullptr) {
  detail::require(eps >= 0.0 && eps < 0.5, Errc::invalid_parameter, "dephasing bounds need 0 <= eps < 1/2");
  const double value = 1.0 / (1.0 - 2.0 * eps);
  const Channel noise = make_noise(Dephasing{eps});
  const Channel u = detail::gate_or_identity(gate, 2);
  const Channel z = unitary_channel(gates::pauli_z(), "Z");
  std::vector<QuasiTerm> terms{
      {(1.0 - eps) / (1.0 - 2.0 * eps), compose(noise, u), "F∘U"},
      {-eps / (1.0 - 2.0 * eps), compose(noise, compose(z, u)), "F∘Z∘U"},
  };
  return {value, value, "systematic witness", "Z decomposition", QuasiDecomposition(std::move(terms)),
          systematic_witness(noise, u)};
}

/// Qubit amplitude damping: (sqrt(1-eps) + eps/2)/(1-eps) <= gamma <= (1+eps)/(1-eps).
inline BoundsReport gamma_amplitude_damping(double eps, const Channel* gate = nullptr) {
  detail::require(eps >= 0.0 && eps < 1.0, Errc::invalid_parameter, "amplitude damping bounds need 0 <= eps < 1");
  const double root = std::sqrt(1.0 - eps);
  const Channel noise = make_noise(AmplitudeDamping{eps});
  const Channel u = detail::gate_or_identity(gate, 2);
  const Channel z = unitary_channel(gates::pauli_z(), "Z");
  const Channel prep0 = preparation_channel(gates::ket0(), "P|0>");
  std::vector<QuasiTerm> terms{
      {(1.0 + root) / (2.0 * (1.0 - eps)), compose(noise, u), "A∘U"},
      {(1.0 - root) / (2.0 * (1.0 - eps)), compose(noise, compose(z, u)), "A∘Z∘U"},
      {-eps / (1.0 - eps), compose(noise, prep0), "A∘P|0>"},
  };
  return {(root + eps / 2.0) / (1.0 - eps), (1.0 + eps) / (1.0 - eps), "systematic witness",
          "three-term decomposition", QuasiDecomposition(std::move(terms)), systematic_witness(noise, u)};
}

/// Checks the general-form hypotheses; returns the reconstructed noise map.
inline LinearMap checked_general_map(const GeneralNoise& g) {
  detail::require(g.eps >= 0.0 && g.eps_plus >= 0.0 && g.eps_minus >= 0.0, Errc::invalid_parameter,
                  "general noise needs eps, eps_plus, eps_minus >= 0");
  detail::require(1.0 - g.eps > g.eps_plus + g.eps_minus, Errc::theorem_inapplicable,
                  "requires 1 - eps > eps_plus + eps_minus");
  const LinearMap e = general_form_map(g);
  detail::require(is_cptp(e).tp, Errc::invalid_spec, "reconstructed noise is not trace preserving");
  return e;
}

/// General noise (1 - eps) id + eps_plus Lambda - eps_minus Xi. The lower
/// bound resums the pattern series exactly as 2 Tr[Phi (id (x) E^-1)(Phi)] - 1;
/// the upper bound is 1/(1 - 2 eps_plus).
inline BoundsReport gamma_general(const GeneralNoise& g, const Channel* gate = nullptr) {
  const LinearMap e = checked_general_map(g);
  const int d = e.dim();
  const Channel u = detail::gate_or_identity(gate, d);
  const LinearMap e_inv = inverse(e);
  BoundsReport r;
  r.lower = 2.0 * entanglement_overlap(e_inv) - 1.0;
  r.upper = 1.0 / (1.0 - 2.0 * g.eps_plus);
  r.method_lower = "systematic witness (exact inverse)";
  r.method_upper = "pattern series decomposition";
  r.witness = systematic_witness(e, u);
  return r;
}

struct SeriesResult {
  /// sum_{i <= i_max} sum_j t_ij (-eps_plus)^j eps_minus^(i-j) / (1-eps)^(i+1)
  double partial_sum = 0.0;
  /// Bound on the omitted tail of partial_sum.
  double tail_bound = 0.0;
  /// 2 * partial_sum - 1; off from the exact lower bound by at most 2 * tail_bound.
  double lower = 0.0;
  std::vector<std::vector<double>> t;
};

inline constexpr int max_series_order = 20;

/// Truncated pattern series. Patterns are bit strings with 1 -> Lambda and
/// 0 -> Xi; the leftmost bit is the outermost (last-applied) map, so
/// k = (0,1,1) is Xi o Lambda o Lambda.
inline SeriesResult t_ij_series(const LinearMap& lambda, const LinearMap& xi, double eps, double eps_plus,
                                double eps_minus, int i_max) {
  if (i_max < 0) throw Error(Errc::invalid_parameter, "i_max must be nonnegative");
  if (i_max > max_series_order)
    throw Error(Errc::resource_limit, "i_max above " + std::to_string(max_series_order));
  detail::require(lambda.dim() == xi.dim(), Errc::invalid_dimension, "Lambda and Xi dimensions differ");
  detail::require(1.0 - eps > 0.0, Errc::invalid_parameter, "eps must be below 1");

  const int d = lambda.dim();
  const double d2 = static_cast<double>(d) * d;
  SeriesResult out;
  out.t.assign(static_cast<std::size_t>(i_max + 1), {});
  for (int i = 0; i <= i_max; ++i) out.t[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(i + 1), 0.0);

  // Depth-first over patterns, extending the prefix product on the right
  // (each new bit is applied before everything already in the prefix).
  std::vector<ComplexMatrix> prefix(static_cast<std::size_t>(i_max + 1));
  prefix[0] = ComplexMatrix::Identity(d * d, d * d);
  std::vector<int> ones(static_cast<std::size_t>(i_max + 1), 0);
  std::vector<int> next_bit(static_cast<std::size_t>(i_max + 1), 0);
  out.t[0][0] = prefix[0].trace().real() / d2;
  int depth = 0;
  while (depth >= 0) {
    auto ud = static_cast<std::size_t>(depth);
    if (depth == i_max || next_bit[ud] > 1) {
      next_bit[ud] = 0;
      --depth;
      continue;
    }
    const int bit = next_bit[ud]++;
    const auto child = ud + 1;
    prefix[child].noalias() = prefix[ud] * (bit == 1 ? lambda.superop() : xi.superop());
    ones[child] = ones[ud] + bit;
    out.t[child][static_cast<std::size_t>(ones[child])] += prefix[child].trace().real() / d2;
    ++depth;
  }

  for (int i = 0; i <= i_max; ++i)
    for (int j = 0; j <= i; ++j)
      out.partial_sum += out.t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                         std::pow(-eps_plus, j) * std::pow(eps_minus, i - j) / std::pow(1.0 - eps, i + 1);
  const double spread = eps_plus + eps_minus;
  const double ratio = spread / (1.0 - eps);
  out.tail_bound = (1.0 - eps) > spread ? std::pow(ratio, i_max + 1) / ((1.0 - eps) - spread)
                                        : std::numeric_limits<double>::infinity();
  out.lower = 2.0 * out.partial_sum - 1.0;
  return out;
}

struct WitnessCheckReport {
  double min_val = std::numeric_limits<double>::infinity();
  double max_val = -std::numeric_limits<double>::infinity();
  long violations = 0;
  long n_samples = 0;
  std::uint64_t seed = 0;
};

/// Tr[Y J_{E o V}] for the sampled programmable operation V of the given
/// index: Haar unitaries, random pure-state preparations and random two-term
/// mixtures of those, cycling with the index.
inline double witness_value(const ComplexMatrix& y, const LinearMap& noise, std::uint64_t seed, long index) {
  auto rng = rng_stream(seed, static_cast<std::uint64_t>(index));
  const int d = noise.dim();
  auto draw_unitary = [&] { return unitary_channel(haar_unitary(d, rng), "V"); };
  auto draw_prep = [&] { return preparation_channel(random_pure_state(d, rng), "P"); };
  LinearMap v = identity_channel(d);
  switch (index % 3) {
    case 0:
      v = draw_unitary();
      break;
    case 1:
      v = draw_prep();
      break;
    default: {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const double p = unit(rng);
      const Channel first = draw_unitary();
      const Channel second = (unit(rng) < 0.5) ? draw_unitary() : draw_prep();
      v = LinearMap(p * first.superop() + (1.0 - p) * second.superop(), "mix");
    }
  }
  return (y * choi(compose(noise, v))).trace().real();
}

/// Falsification check of the dual constraints 0 <= Tr[Y J_{E o V}] <= 1 on
/// n_samples random programmable V. Passing is evidence, not proof.
inline WitnessCheckReport witness_check(const Witness& w, const LinearMap& noise, long n_samples,
                                        std::uint64_t seed, int workers = 1) {
  if (w.y.rows() != noise.dim() * noise.dim()) throw Error(Errc::invalid_dimension, "witness dimension mismatch");
  constexpr double slack = 1e-9;
  workers = std::max(1, workers);
  std::vector<WitnessCheckReport> partial(static_cast<std::size_t>(workers));
  auto run = [&](int worker) {
    auto& rep = partial[static_cast<std::size_t>(worker)];
    for (long s = worker; s < n_samples; s += workers) {
      const double v = witness_value(w.y, noise, seed, s);
      rep.min_val = std::min(rep.min_val, v);
      rep.max_val = std::max(rep.max_val, v);
      if (v < -slack || v > 1.0 + slack) ++rep.violations;
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < workers; ++k) pool.emplace_back(run, k);
    for (auto& t : pool) t.join();
  }
  WitnessCheckReport total;
  total.n_samples = n_samples;
  total.seed = seed;
  for (const auto& p : partial) {
    total.min_val = std::min(total.min_val, p.min_val);
    total.max_val = std::max(total.max_val, p.max_val);
    total.violations += p.violations;
  }
  return total;
}

/// Hoeffding sample count ceil((2 gamma^2 / delta^2) ln(2 / fail_prob)).
/// Values within 1e-12 (relative) of an integer are taken as that integer.
inline std::uint64_t hoeffding_samples(double gamma_tot, double delta, double fail_prob) {
  detail::require(gamma_tot > 0.0 && delta > 0.0 && fail_prob > 0.0 && fail_prob < 1.0, Errc::invalid_parameter,
                  "hoeffding_samples needs positive gamma, delta and 0 < fail_prob < 1");
  const double x = 2.0 * gamma_tot * gamma_tot / (delta * delta) * std::log(2.0 / fail_prob);
  const double nearest = std::round(x);
  const double n = std::abs(x - nearest) <= 1e-12 * std::max(1.0, x) ? nearest : std::ceil(x);
  return static_cast<std::uint64_t>(n);
}

}  // namespace qpec
