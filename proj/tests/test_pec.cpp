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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qpec/bases.hpp"
#include "qpec/bounds.hpp"
#include "qpec/decomposer.hpp"
#include "qpec/noise.hpp"
#include "qpec/pec.hpp"
#include "stats.hpp"
#include "test_util.hpp"

namespace {

using namespace qpec;
namespace g = qpec::gates;

Circuit circuit(const ComplexVector& psi, std::vector<ComplexMatrix> us, const ComplexMatrix& obs) {
  Circuit c;
  c.dim = static_cast<int>(psi.size());
  c.input_state = g::projector(psi);
  c.observable = obs;
  for (std::size_t k = 0; k < us.size(); ++k) c.gates.push_back(unitary_channel(us[k], "U" + std::to_string(k)));
  return c;
}

std::vector<QuasiDecomposition> theorem_decs(const Circuit& c, const NoiseSpec& spec) {
  std::vector<QuasiDecomposition> out;
  for (const auto& gate : c.gates) {
    if (const auto* s = std::get_if<Dephasing>(&spec)) out.push_back(*gamma_dephasing(s->eps, &gate).decomposition);
    if (const auto* s = std::get_if<Depolarizing>(&spec))
      out.push_back(*gamma_depolarizing(s->d, s->eps, &gate).decomposition);
    if (const auto* s = std::get_if<AmplitudeDamping>(&spec))
      out.push_back(*gamma_amplitude_damping(s->eps, &gate).decomposition);
  }
  return out;
}

TEST(Ideal, Examples) {
  EXPECT_NEAR(ideal_expectation(circuit(g::ket0(), {}, g::pauli_z())), 1.0, 1e-15);
  EXPECT_NEAR(ideal_expectation(circuit(g::ket0(), {g::pauli_x()}, g::pauli_z())), -1.0, 1e-15);
  EXPECT_NEAR(ideal_expectation(circuit(g::ket0(), {g::hadamard(), g::t_gate(), g::hadamard()}, g::pauli_z())),
              std::cos(std::numbers::pi / 4), 1e-12);
}

TEST(Ideal, InvalidCircuits) {
  Circuit c = circuit(g::ket0(), {g::hadamard()}, g::pauli_z());
  c.input_state(0, 0) = 2.0;
  EXPECT_THROW(ideal_expectation(c), Error);
  c = circuit(g::ket0(), {g::hadamard()}, g::pauli_z());
  c.observable(0, 1) = 1.0;
  EXPECT_THROW(ideal_expectation(c), Error);
  c = circuit(g::ket0(), {g::hadamard()}, g::pauli_z());
  c.gates.push_back(identity_channel(4));
  EXPECT_THROW(ideal_expectation(c), Error);
}

TEST(Noisy, Examples) {
  EXPECT_NEAR(noisy_expectation(circuit(g::ket_plus(), {g::identity()}, g::pauli_x()), make_noise(Dephasing{0.25})),
              0.5, 1e-15);
  EXPECT_NEAR(noisy_expectation(circuit(g::ket0(), {g::pauli_x()}, g::pauli_z()), make_noise(Depolarizing{2, 0.1})),
              -0.9, 1e-15);
  SplitMix64 rng(3);
  const Circuit c = circuit(random_pure_state(2, rng), {haar_unitary(2, rng), haar_unitary(2, rng)}, g::identity());
  EXPECT_NEAR(noisy_expectation(c, random_channel(2, 3, rng)), 1.0, 1e-12);
  EXPECT_THROW(noisy_expectation(c, identity_channel(3)), Error);
}

TEST(RunPec, DephasingTheoremDecomposition) {
  const Circuit c = circuit(g::ket_plus(), {g::identity()}, g::pauli_x());
  const auto r = run_pec(c, theorem_decs(c, Dephasing{0.25}), 1000000, 42);
  EXPECT_LT(std::abs(r.estimate - 1.0), 5.0 * r.std_error);
  EXPECT_DOUBLE_EQ(r.gamma_tot, 2.0);
  EXPECT_EQ(r.n_samples, 1000000);
  EXPECT_EQ(r.seed, 42u);
}

TEST(RunPec, NoiselessSingleTermIsShotNoiseOnly) {
  const Circuit c = circuit(g::ket0(), {g::hadamard(), g::t_gate(), g::hadamard()}, g::pauli_z());
  std::vector<QuasiDecomposition> decs;
  for (const auto& gate : c.gates) decs.push_back(QuasiDecomposition({{1.0, gate, gate.label()}}));
  const long n = 200000;
  const auto r = run_pec(c, decs, n, 7);
  const double ideal = ideal_expectation(c);
  EXPECT_DOUBLE_EQ(r.gamma_tot, 1.0);
  EXPECT_LT(std::abs(r.estimate - ideal), 5.0 * r.std_error);
  // Two-outcome measurement: variance 1 - <Z>^2.
  EXPECT_NEAR(r.std_error, std::sqrt((1.0 - ideal * ideal) / n), 0.02 * r.std_error);
  const auto exact = run_pec(c, decs, 1000, 7, {1, true});
  EXPECT_NEAR(exact.estimate, ideal, 1e-12);
  EXPECT_NEAR(exact.std_error, 0.0, 1e-12);
}

TEST(RunPec, VarianceGrowsLikeGammaSquared) {
  const Circuit c = circuit(g::ket_plus(), {g::identity()}, g::pauli_x());
  const long n = 400000;
  const auto mitigated = run_pec(c, theorem_decs(c, Dephasing{0.25}), n, 1);
  // Unmitigated baseline: the noisy identity run as its own one-term circuit.
  Circuit noisy = c;
  noisy.gates = {make_noise(Dephasing{0.25})};
  const auto plain = run_pec(noisy, {QuasiDecomposition({{1.0, noisy.gates[0], "F"}})}, n, 2);
  EXPECT_NEAR(plain.estimate, 0.5, 5.0 * plain.std_error);
  const double ratio = std::pow(mitigated.std_error / plain.std_error, 2.0);
  EXPECT_NEAR(ratio, 4.0, 0.2 * 4.0);
}

TEST(RunPec, RejectsInvalidDecompositions) {
  const Circuit c = circuit(g::ket0(), {g::hadamard()}, g::pauli_z());
  try {
    run_pec(c, theorem_decs(circuit(g::ket0(), {g::pauli_x()}, g::pauli_z()), Dephasing{0.1}), 100, 1);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_input);
  }
  // Decomposing over the raw b16 set keeps zero-weight projections that are
  // not trace preserving; the sampler refuses them.
  const auto over_b16 = decompose_exact(c.gates[0], basis_b16().elements);
  EXPECT_THROW(run_pec(c, {over_b16}, 100, 1), Error);
  EXPECT_THROW(run_pec(c, {}, 100, 1), Error);
  EXPECT_THROW(run_pec(c, theorem_decs(c, Dephasing{0.1}), 0, 1), Error);
}

TEST(RunPec, UnbiasedForEveryPreset) {
  SplitMix64 rng(8);
  const ComplexMatrix u1 = haar_unitary(2, rng);
  const ComplexMatrix u2 = haar_unitary(2, rng);
  const Circuit c = circuit(g::ket0(), {u1, g::hadamard(), u2}, g::axis_pauli(0.6, 0.0, 0.8));
  const double ideal = ideal_expectation(c);
  for (const NoiseSpec& spec : std::vector<NoiseSpec>{Dephasing{0.2}, Depolarizing{2, 0.1}, AmplitudeDamping{0.1}}) {
    const auto r = run_pec(c, theorem_decs(c, spec), 1000000, 11);
    EXPECT_LT(std::abs(r.estimate - ideal), 5.0 * r.std_error) << describe(spec);
  }
  const double pi8 = std::numbers::pi / 8.0;
  const auto gd = to_general_form(GeneralizedDephasing{{std::cos(pi8), 0.0, std::sin(pi8)}, 0.1});
  const auto r = run_pec_general(c, gd, 1000000, 12);
  EXPECT_LT(std::abs(r.estimate - ideal), 5.0 * r.std_error);
}

TEST(RunPec, LpDecompositionsOverB13) {
  SplitMix64 rng(9);
  const Circuit c = circuit(g::ket_plus(), {haar_unitary(2, rng), haar_unitary(2, rng)}, g::pauli_z());
  const auto ops = noisy_basis(make_noise(AmplitudeDamping{0.15}), basis_b13().elements);
  std::vector<QuasiDecomposition> decs;
  for (const auto& gate : c.gates) decs.push_back(decompose_l1(gate, ops));
  const auto r = run_pec(c, decs, 1000000, 13);
  EXPECT_LT(std::abs(r.estimate - ideal_expectation(c)), 5.0 * r.std_error);
  EXPECT_NEAR(r.gamma_tot, decs[0].gamma() * decs[1].gamma(), 1e-12);
}

TEST(RunPec, TwoQubitCircuit) {
  const ComplexVector psi = kron(g::projector(g::ket_plus()), g::projector(g::ket0())).col(0) * std::numbers::sqrt2;
  Circuit c = circuit(psi, {g::cnot(), kron(g::t_gate(), g::hadamard())}, kron(g::pauli_x(), g::pauli_x()));
  const auto decs = theorem_decs(c, Depolarizing{4, 0.05});
  const auto r = run_pec(c, decs, 400000, 14);
  EXPECT_LT(std::abs(r.estimate - ideal_expectation(c)), 5.0 * r.std_error);
}

TEST(RunPec, ReproducibleAcrossWorkerCounts) {
  const Circuit c = circuit(g::ket0(), {g::hadamard(), g::t_gate()}, g::pauli_x());
  const auto decs = theorem_decs(c, AmplitudeDamping{0.2});
  const auto a = run_pec(c, decs, 50000, 5, {1, false});
  const auto b = run_pec(c, decs, 50000, 5, {2, false});
  const auto d = run_pec(c, decs, 50000, 5, {4, false});
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.estimate, d.estimate);
  EXPECT_EQ(a.std_error, d.std_error);
  const auto gn = amplitude_damping_general_form(0.2);
  EXPECT_EQ(run_pec_general(c, gn, 30000, 6, {1, false}).estimate, run_pec_general(c, gn, 30000, 6, {3, false}).estimate);
}

TEST(RunPec, GammaIsMultiplicative) {
  const Circuit c = circuit(g::ket0(), {g::hadamard(), g::t_gate(), g::pauli_x()}, g::pauli_z());
  const auto decs = theorem_decs(c, Depolarizing{2, 0.1});
  const auto r = run_pec(c, decs, 100, 1);
  EXPECT_EQ(r.gamma_tot, decs[0].gamma() * decs[1].gamma() * decs[2].gamma());
}

TEST(RunPec, HoeffdingCountSuffices) {
  const Circuit c = circuit(g::ket_plus(), {g::identity()}, g::pauli_x());
  const auto decs = theorem_decs(c, Dephasing{0.25});
  const double delta = 0.05;
  const long n = static_cast<long>(hoeffding_samples(2.0, delta, 0.05));
  int inside = 0;
  for (std::uint64_t run = 0; run < 100; ++run)
    if (std::abs(run_pec(c, decs, n, 1000 + run).estimate - 1.0) < delta) ++inside;
  EXPECT_GE(inside, 95);
}

TEST(Series, DegenerateCaseIsAlwaysIdentity) {
  SplitMix64 rng(1);
  for (int k = 0; k < 100; ++k) {
    const auto t = sample_series_term(0.0, 0.0, 0.0, rng);
    EXPECT_EQ(t.order, 0);
    EXPECT_TRUE(t.pattern.empty());
  }
}

TEST(Series, ProbabilityOfOrderZero) {
  const SeriesSampler sampler(0.05, 0.03, 0.02);
  auto rng = rng_stream(21, 0);
  const long n = 1000000;
  long zeros = 0;
  for (long k = 0; k < n; ++k) zeros += sampler(rng).order == 0 ? 1 : 0;
  const double p = 0.9 / 0.95;
  EXPECT_NEAR(static_cast<double>(zeros) / n, p, 3.0 * std::sqrt(p * (1.0 - p) / n));
}

TEST(Series, LambdaCountGivenOrderThreeIsBinomial) {
  const SeriesSampler sampler(0.05, 0.03, 0.02);
  auto rng = rng_stream(22, 0);
  std::vector<double> counts(4, 0.0);
  double total = 0.0;
  for (long k = 0; k < 1000000; ++k) {
    const auto t = sampler(rng);
    if (t.order != 3) continue;
    counts[static_cast<std::size_t>(t.lambda_count)] += 1.0;
    total += 1.0;
  }
  std::vector<double> probs;
  for (int j = 0; j <= 3; ++j)
    probs.push_back(std::tgamma(4.0) / (std::tgamma(j + 1.0) * std::tgamma(4.0 - j)) * std::pow(0.6, j) *
                    std::pow(0.4, 3 - j));
  const auto chi = qpec::testing::chi_square(counts, probs, total);
  EXPECT_GT(chi.p_value, 0.01) << "chi2=" << chi.statistic << " dof=" << chi.dof;
}

TEST(Series, PatternsAreUniform) {
  const SeriesSampler sampler(0.0, 0.3, 0.3);
  auto rng = rng_stream(23, 0);
  std::vector<double> position(3, 0.0);
  double total = 0.0;
  for (long k = 0; k < 400000; ++k) {
    const auto t = sampler(rng);
    if (t.order != 3 || t.lambda_count != 1) continue;
    for (std::size_t b = 0; b < 3; ++b)
      if (t.pattern[b] == 1) position[b] += 1.0;
    total += 1.0;
  }
  const auto chi = qpec::testing::chi_square(position, {1.0 / 3, 1.0 / 3, 1.0 / 3}, total);
  EXPECT_GT(chi.p_value, 0.01);
}

TEST(Series, JointDistribution) {
  const std::vector<std::array<double, 3>> triples{{0.05, 0.03, 0.02}, {0.2, 0.15, 0.1}, {0.0, 0.4, 0.0}};
  std::uint64_t seed = 101;
  for (const auto& [e, ep, em] : triples) {
    const auto chi = qpec::testing::series_joint_test(e, ep, em, 1000000, seed++);
    EXPECT_GT(chi.p_value, 0.01) << e << " " << ep << " " << em << " chi2=" << chi.statistic << " dof=" << chi.dof;
    EXPECT_GT(chi.dof, 1);
  }
}

TEST(Series, JointTestPValuesAreUniform) {
  // A correct sampler fails a 1% test in about 1% of seeds; 50 seeds with
  // more than 5 failures would be a 1e-4 event.
  int below = 0;
  for (std::uint64_t seed = 500; seed < 550; ++seed)
    below += qpec::testing::series_joint_test(0.05, 0.03, 0.02, 100000, seed).p_value < 0.01 ? 1 : 0;
  EXPECT_LE(below, 5);
}

TEST(Series, HypothesisViolated) {
  SplitMix64 rng(1);
  try {
    sample_series_term(0.5, 0.3, 0.3, rng);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::theorem_inapplicable);
  }
}

TEST(RunPecGeneral, AmplitudeDamping) {
  const Circuit c = circuit(g::ket1(), {g::identity()}, g::pauli_z());
  const auto r = run_pec_general(c, amplitude_damping_general_form(0.1), 1000000, 42);
  EXPECT_LT(std::abs(r.estimate + 1.0), 5.0 * r.std_error);
  EXPECT_NEAR(r.gamma_tot, 1.25, 1e-15);
  EXPECT_EQ(r.truncated_draws, 0);
}

TEST(RunPecGeneral, NoiselessIsBareCircuit) {
  const Circuit c = circuit(g::ket0(), {g::hadamard(), g::t_gate(), g::hadamard()}, g::pauli_z());
  const GeneralNoise none{0.0, 0.0, 0.0, identity_channel(2), identity_channel(2)};
  const auto r = run_pec_general(c, none, 1000, 3, {1, true});
  EXPECT_NEAR(r.estimate, ideal_expectation(c), 1e-12);
  EXPECT_NEAR(r.std_error, 0.0, 1e-12);
  EXPECT_EQ(r.gamma_tot, 1.0);
}

TEST(RunPecGeneral, GammaPerGate) {
  const Circuit c = circuit(g::ket0(), {g::hadamard(), g::t_gate(), g::hadamard()}, g::pauli_z());
  const auto gn = amplitude_damping_general_form(0.2);
  EXPECT_NEAR(run_pec_general(c, gn, 10, 1).gamma_tot, std::pow(1.0 / (1.0 - 0.4), 3), 1e-12);
}

TEST(RunPecGeneral, HypothesisViolated) {
  const Circuit c = circuit(g::ket0(), {g::hadamard()}, g::pauli_z());
  EXPECT_THROW(run_pec_general(c, GeneralNoise{0.6, 0.3, 0.3, identity_channel(2), identity_channel(2)}, 10, 1), Error);
}

}  // namespace
