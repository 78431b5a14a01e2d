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
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "qpec/bounds.hpp"
#include "qpec/channel.hpp"
#include "qpec/decomposer.hpp"
#include "qpec/noise.hpp"
#include "qpec/rng.hpp"

namespace qpec {

/// rho_f = U_L o ... o U_1(rho_i), observed through a Hermitian A.
struct Circuit {
  int dim = 2;
  ComplexMatrix input_state;
  std::vector<Channel> gates;
  ComplexMatrix observable;
};

struct PecResult {
  double estimate = 0.0;
  double std_error = 0.0;
  double gamma_tot = 1.0;
  long n_samples = 0;
  std::uint64_t seed = 0;
  /// Series draws clipped at the geometric cap (run_pec_general only).
  long truncated_draws = 0;
};

struct PecOptions {
  int workers = 1;
  /// Replace the single-shot outcome by Tr[A rho] of the sampled final state.
  /// Lower variance, but not a physical measurement model.
  bool exact_shots = false;
};

inline void validate_circuit(const Circuit& c) {
  const int d = c.dim;
  if (c.input_state.rows() != d || c.input_state.cols() != d || c.observable.rows() != d ||
      c.observable.cols() != d)
    throw Error(Errc::invalid_dimension, "circuit state/observable dimension mismatch");
  for (const auto& g : c.gates)
    if (g.dim() != d) throw Error(Errc::invalid_dimension, "gate '" + g.label() + "' has the wrong dimension");
  if (!is_hermitian(c.observable, 1e-12)) throw Error(Errc::invalid_input, "observable is not Hermitian");
  if (!is_hermitian(c.input_state, 1e-10)) throw Error(Errc::invalid_input, "input state is not Hermitian");
  if (std::abs(c.input_state.trace() - Complex(1.0, 0.0)) > 1e-10)
    throw Error(Errc::invalid_input, "input state does not have unit trace");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(c.input_state, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10) throw Error(Errc::invalid_input, "input state is not PSD");
}

/// Tr[A U_L o ... o U_1(rho)].
inline double ideal_expectation(const Circuit& c) {
  validate_circuit(c);
  ComplexMatrix rho = c.input_state;
  for (const auto& g : c.gates) rho = qpec::apply(g, rho);
  return (c.observable * rho).trace().real();
}

/// Expectation with the noise applied after every gate and no mitigation.
inline double noisy_expectation(const Circuit& c, const LinearMap& noise) {
  validate_circuit(c);
  if (noise.dim() != c.dim) throw Error(Errc::invalid_dimension, "noise dimension mismatch");
  ComplexMatrix rho = c.input_state;
  for (const auto& g : c.gates) rho = qpec::apply(noise, qpec::apply(g, rho));
  return (c.observable * rho).trace().real();
}

namespace detail {

inline double unit_uniform(SplitMix64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Row-major dense superoperator for allocation-free application.
struct FlatMap {
  int n = 0;
  std::vector<Complex> m;

  explicit FlatMap(const LinearMap& map) : n(static_cast<int>(map.superop().rows())), m(static_cast<std::size_t>(n) * n) {
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) m[static_cast<std::size_t>(r) * n + c] = map.superop()(r, c);
  }

  void apply(const Complex* in, Complex* out) const {
    for (int r = 0; r < n; ++r) {
      Complex acc{0.0, 0.0};
      const Complex* row = &m[static_cast<std::size_t>(r) * n];
      for (int c = 0; c < n; ++c) acc += row[c] * in[c];
      out[r] = acc;
    }
  }
};

/// Projective measurement of A in its eigenbasis, or the exact expectation.
class Measurement {
 public:
  Measurement(const ComplexMatrix& a, bool exact) : exact_(exact) {
    const auto d = a.rows();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(a);
    for (Eigen::Index k = 0; k < d; ++k) {
      values_.push_back(eig.eigenvalues()(k));
      std::vector<Complex> w(static_cast<std::size_t>(d * d));
      const ComplexVector v = eig.eigenvectors().col(k);
      // <v|rho|v> = sum_ab conj(v_a) rho_ab v_b with rho_ab at a + d*b.
      for (Eigen::Index a_ = 0; a_ < d; ++a_)
        for (Eigen::Index b = 0; b < d; ++b) w[static_cast<std::size_t>(a_ + d * b)] = std::conj(v(a_)) * v(b);
      weights_.push_back(std::move(w));
    }
    expectation_.resize(static_cast<std::size_t>(d * d));
    for (Eigen::Index a_ = 0; a_ < d; ++a_)
      for (Eigen::Index b = 0; b < d; ++b) expectation_[static_cast<std::size_t>(a_ + d * b)] = a(b, a_);
  }

  double outcome(const Complex* rho, SplitMix64& rng) const {
    if (exact_) return dot(expectation_, rho);
    double total = 0.0;
    probs_scratch_.resize(values_.size());
    for (std::size_t k = 0; k < values_.size(); ++k) {
      probs_scratch_[k] = std::max(0.0, dot(weights_[k], rho));
      total += probs_scratch_[k];
    }
    double u = unit_uniform(rng) * total;
    for (std::size_t k = 0; k + 1 < values_.size(); ++k) {
      if (u < probs_scratch_[k]) return values_[k];
      u -= probs_scratch_[k];
    }
    return values_.back();
  }

 private:
  static double dot(const std::vector<Complex>& w, const Complex* rho) {
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * rho[i];
    return acc.real();
  }

  bool exact_;
  std::vector<double> values_;
  std::vector<std::vector<Complex>> weights_;
  std::vector<Complex> expectation_;
  mutable std::vector<double> probs_scratch_;
};

inline constexpr long block_size = 8192;

struct BlockSum {
  double sum = 0.0;
  double sum_sq = 0.0;
  long truncated = 0;
};

/// Runs sample(index, sum-accumulator) over fixed blocks of indices and
/// reduces the blocks in order, so the result does not depend on the worker
/// count. `make_worker_state` builds per-thread scratch.
template <typename MakeState, typename Sample>
std::vector<BlockSum> run_blocks(long n_samples, int workers, MakeState make_state, Sample sample) {
  const long n_blocks = (n_samples + block_size - 1) / block_size;
  std::vector<BlockSum> blocks(static_cast<std::size_t>(n_blocks));
  workers = std::max(1, workers);
  auto run = [&](int worker) {
    auto state = make_state();
    for (long b = worker; b < n_blocks; b += workers) {
      BlockSum acc;
      const long end = std::min(n_samples, (b + 1) * block_size);
      for (long s = b * block_size; s < end; ++s) {
        const double v = sample(state, s, acc.truncated);
        acc.sum += v;
        acc.sum_sq += v * v;
      }
      blocks[static_cast<std::size_t>(b)] = acc;
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < workers; ++k) pool.emplace_back(run, k);
    for (auto& t : pool) t.join();
  }
  return blocks;
}

inline PecResult summarize(const std::vector<BlockSum>& blocks, long n, std::uint64_t seed, double gamma_tot) {
  PecResult r;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& b : blocks) {
    sum += b.sum;
    sum_sq += b.sum_sq;
    r.truncated_draws += b.truncated;
  }
  r.n_samples = n;
  r.seed = seed;
  r.gamma_tot = gamma_tot;
  r.estimate = sum / static_cast<double>(n);
  const double var =
      n > 1 ? std::max(0.0, (sum_sq - static_cast<double>(n) * r.estimate * r.estimate) / static_cast<double>(n - 1))
            : 0.0;
  r.std_error = std::sqrt(var / static_cast<double>(n));
  return r;
}

}  // namespace detail

/// Probabilistic error cancellation: per gate, draw term a with probability
/// |eta_a| / gamma, run the sampled noisy operations, measure A, and average
/// gamma_tot * sign_tot * outcome. Sample s uses rng_stream(seed, s); within a
/// sample, draws are taken in gate order followed by the measurement.
inline PecResult run_pec(const Circuit& c, const std::vector<QuasiDecomposition>& decs, long n_samples,
                         std::uint64_t seed, const PecOptions& options = {}) {
  validate_circuit(c);
  if (n_samples <= 0) throw Error(Errc::invalid_parameter, "n_samples must be positive");
  if (decs.size() != c.gates.size()) throw Error(Errc::invalid_input, "one decomposition per gate required");

  struct GateTable {
    std::vector<double> cumulative;
    std::vector<detail::FlatMap> ops;
    std::vector<double> signs;
  };
  std::vector<GateTable> tables;
  double gamma_tot = 1.0;
  for (std::size_t g = 0; g < decs.size(); ++g) {
    const auto& dec = decs[g];
    if (dec.terms().empty()) throw Error(Errc::invalid_input, "empty decomposition");
    if (!(validate(dec, c.gates[g]) < 1e-8))
      throw Error(Errc::invalid_input, "decomposition " + std::to_string(g) + " does not reproduce its gate");
    GateTable t;
    double acc = 0.0;
    for (const auto& term : dec.terms()) {
      if (!is_cptp(term.op).tp)
        throw Error(Errc::invalid_input, "term '" + term.label + "' is not trace preserving");
      acc += std::abs(term.eta) / dec.gamma();
      t.cumulative.push_back(acc);
      t.ops.emplace_back(term.op);
      t.signs.push_back(term.eta < 0.0 ? -1.0 : 1.0);
    }
    gamma_tot *= dec.gamma();
    tables.push_back(std::move(t));
  }

  const int n = c.dim * c.dim;
  const ComplexVector rho0 = vec(c.input_state);
  const detail::Measurement measure(c.observable, options.exact_shots);
  struct Scratch {
    std::vector<Complex> a, b;
    detail::Measurement m;
  };
  auto make_state = [&] {
    return Scratch{std::vector<Complex>(static_cast<std::size_t>(n)), std::vector<Complex>(static_cast<std::size_t>(n)),
                   measure};
  };
  auto sample = [&](Scratch& s, long index, long&) {
    auto rng = rng_stream(seed, static_cast<std::uint64_t>(index));
    std::copy(rho0.data(), rho0.data() + n, s.a.begin());
    double sign = 1.0;
    for (const auto& t : tables) {
      const double u = detail::unit_uniform(rng);
      auto it = std::upper_bound(t.cumulative.begin(), t.cumulative.end(), u);
      auto k = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - t.cumulative.begin(),
                                                                  static_cast<std::ptrdiff_t>(t.ops.size()) - 1));
      t.ops[k].apply(s.a.data(), s.b.data());
      std::swap(s.a, s.b);
      sign *= t.signs[k];
    }
    return gamma_tot * sign * s.m.outcome(s.a.data(), rng);
  };
  const auto blocks = detail::run_blocks(n_samples, options.workers, make_state, sample);
  return detail::summarize(blocks, n_samples, seed, gamma_tot);
}

struct SeriesTerm {
  int order = 0;
  int lambda_count = 0;
  /// Bits, 1 -> Lambda, 0 -> Xi; index 0 is the outermost (last-applied) map.
  std::vector<std::uint8_t> pattern;
  bool truncated = false;
};

inline constexpr int max_series_draw = 10000;

/// Draws (i, j, pattern) with probability
///   (1 - eps - (eps_plus + eps_minus)) eps_plus^j eps_minus^(i-j) / (1-eps)^(i+1):
/// i heads of a coin with p_head = (eps_plus + eps_minus)/(1 - eps) before the
/// first tail, j ~ Binomial(i, eps_plus/(eps_plus + eps_minus)), pattern
/// uniform over the C(i, j) arrangements.
class SeriesSampler {
 public:
  SeriesSampler(double eps, double eps_plus, double eps_minus) {
    if (!(eps >= 0.0 && eps_plus >= 0.0 && eps_minus >= 0.0))
      throw Error(Errc::invalid_parameter, "series sampler needs nonnegative parameters");
    if (!(1.0 - eps > eps_plus + eps_minus))
      throw Error(Errc::theorem_inapplicable, "series sampler requires 1 - eps > eps_plus + eps_minus");
    const double spread = eps_plus + eps_minus;
    p_head_ = spread / (1.0 - eps);
    p_lambda_ = spread > 0.0 ? eps_plus / spread : 0.0;
  }

  template <typename Rng>
  SeriesTerm operator()(Rng& rng) const {
    SeriesTerm term;
    if (p_head_ > 0.0) {
      std::geometric_distribution<long> geometric(1.0 - p_head_);
      long i = geometric(rng);
      if (i > max_series_draw) {
        i = max_series_draw;
        term.truncated = true;
      }
      term.order = static_cast<int>(i);
    }
    if (term.order > 0) {
      std::binomial_distribution<int> binomial(term.order, p_lambda_);
      term.lambda_count = binomial(rng);
      term.pattern.assign(static_cast<std::size_t>(term.order), 0);
      std::fill_n(term.pattern.begin(), term.lambda_count, std::uint8_t{1});
      std::shuffle(term.pattern.begin(), term.pattern.end(), rng);
    }
    return term;
  }

  double p_head() const noexcept { return p_head_; }
  double p_lambda() const noexcept { return p_lambda_; }

 private:
  double p_head_ = 0.0;
  double p_lambda_ = 0.0;
};

template <typename Rng>
SeriesTerm sample_series_term(double eps, double eps_plus, double eps_minus, Rng& rng) {
  return SeriesSampler(eps, eps_plus, eps_minus)(rng);
}

/// PEC for general-form noise at cost 1/(1 - 2 eps_plus) per gate: each gate
/// runs E o (Lambda^j, Xi^(i-j))_k o U with sign (-1)^j.
inline PecResult run_pec_general(const Circuit& c, const GeneralNoise& spec, long n_samples, std::uint64_t seed,
                                 const PecOptions& options = {}) {
  validate_circuit(c);
  if (n_samples <= 0) throw Error(Errc::invalid_parameter, "n_samples must be positive");
  const LinearMap e_map = checked_general_map(spec);
  if (e_map.dim() != c.dim) throw Error(Errc::invalid_dimension, "noise dimension mismatch");
  const SeriesSampler sampler(spec.eps, spec.eps_plus, spec.eps_minus);
  const double gamma_gate = 1.0 / (1.0 - 2.0 * spec.eps_plus);
  const double gamma_tot = std::pow(gamma_gate, static_cast<double>(c.gates.size()));

  const detail::FlatMap noise(e_map);
  const detail::FlatMap lambda(spec.lambda);
  const detail::FlatMap xi(spec.xi);
  std::vector<detail::FlatMap> gates;
  for (const auto& g : c.gates) gates.emplace_back(g);

  const int n = c.dim * c.dim;
  const ComplexVector rho0 = vec(c.input_state);
  const detail::Measurement measure(c.observable, options.exact_shots);
  struct Scratch {
    std::vector<Complex> a, b;
    detail::Measurement m;
  };
  auto make_state = [&] {
    return Scratch{std::vector<Complex>(static_cast<std::size_t>(n)), std::vector<Complex>(static_cast<std::size_t>(n)),
                   measure};
  };
  auto sample = [&](Scratch& s, long index, long& truncated) {
    auto rng = rng_stream(seed, static_cast<std::uint64_t>(index));
    std::copy(rho0.data(), rho0.data() + n, s.a.begin());
    double sign = 1.0;
    auto step = [&s](const detail::FlatMap& m) {
      m.apply(s.a.data(), s.b.data());
      std::swap(s.a, s.b);
    };
    for (const auto& g : gates) {
      const SeriesTerm term = sampler(rng);
      if (term.truncated) ++truncated;
      step(g);
      for (auto it = term.pattern.rbegin(); it != term.pattern.rend(); ++it) step(*it ? lambda : xi);
      step(noise);
      if (term.lambda_count % 2 == 1) sign = -sign;
    }
    return gamma_tot * sign * s.m.outcome(s.a.data(), rng);
  };
  const auto blocks = detail::run_blocks(n_samples, options.workers, make_state, sample);
  return detail::summarize(blocks, n_samples, seed, gamma_tot);
}

}  // namespace qpec
