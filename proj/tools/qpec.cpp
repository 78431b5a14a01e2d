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

// qpec: optimal quasiprobability costs, decompositions and PEC simulation.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qpec/qpec.hpp"

namespace {

using qpec::Errc;
using qpec::Error;
using qpec::io::json;

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

/// Shortest string that reads back to the same double.
std::string exact(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : fmt9(v);
}

struct Common {
  bool json_out = false;
  std::optional<std::uint64_t> seed;
  int workers = 1;
};

std::uint64_t require_seed(const Common& c) {
  if (c.seed) return *c.seed;
  if (const char* env = std::getenv("QPEC_SEED")) {
    std::uint64_t s = 0;
    const std::string_view text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), s);
    if (ec != std::errc() || ptr != text.data() + text.size())
      throw Error(Errc::parse_error, "QPEC_SEED is not an unsigned integer");
    return s;
  }
  throw Error(Errc::parse_error, "this command is randomized: pass --seed or set QPEC_SEED");
}

qpec::NoiseSpec load_noise(const std::string& text, const std::string& file) {
  if (!file.empty()) return qpec::io::noise_from_json(qpec::io::read_json_file(file));
  if (text.empty()) throw Error(Errc::parse_error, "--noise or --noise-file is required");
  return qpec::io::parse_noise(text);
}

/// "id", a named gate (x, y, z, h, s, t, cnot, swap, iswap) or a JSON matrix file.
qpec::Channel load_unitary(const std::string& what, int d) {
  namespace g = qpec::gates;
  auto named = [&](const qpec::ComplexMatrix& u, const char* label) {
    if (u.rows() != d) throw Error(Errc::invalid_dimension, std::string(label) + " does not act on dimension " + std::to_string(d));
    return qpec::unitary_channel(u, label);
  };
  if (what == "id") return qpec::identity_channel(d);
  if (what == "x") return named(g::pauli_x(), "X");
  if (what == "y") return named(g::pauli_y(), "Y");
  if (what == "z") return named(g::pauli_z(), "Z");
  if (what == "h") return named(g::hadamard(), "H");
  if (what == "s") return named(g::phase_s(), "S");
  if (what == "t") return named(g::t_gate(), "T");
  if (what == "cnot") return named(g::cnot(), "CNOT");
  if (what == "swap") return named(g::swap(), "SWAP");
  if (what == "iswap") return named(g::iswap(), "iSWAP");
  const qpec::ComplexMatrix u = qpec::io::matrix_from_json(qpec::io::read_json_file(what));
  if (u.rows() != d || u.cols() != d) throw Error(Errc::invalid_dimension, "target dimension does not match the noise");
  if (!qpec::is_unitary(u, 1e-10)) throw Error(Errc::invalid_input, "target matrix is not unitary");
  return qpec::unitary_channel(u, "U");
}

/// Theorem-backed bounds for each preset; generalized dephasing and
/// general-form noise go through the general-form bounds.
qpec::BoundsReport bounds_for(const qpec::NoiseSpec& spec, const qpec::Channel* gate) {
  using namespace qpec;
  if (const auto* s = std::get_if<Depolarizing>(&spec)) return gamma_depolarizing(s->d, s->eps, gate);
  if (const auto* s = std::get_if<Dephasing>(&spec)) return gamma_dephasing(s->eps, gate);
  if (const auto* s = std::get_if<AmplitudeDamping>(&spec)) return gamma_amplitude_damping(s->eps, gate);
  return gamma_general(to_general_form(spec), gate);
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

void print_decomposition(const qpec::QuasiDecomposition& dec) {
  std::cout << "gamma " << fmt9(dec.gamma()) << "\n";
  for (const auto& t : dec.terms())
    if (std::abs(t.eta) > 1e-12) std::cout << "  " << fmt9(t.eta) << "\t" << t.label << "\n";
}

// --- bounds ---------------------------------------------------------------

struct BoundsArgs {
  std::string noise, noise_file, gate = "id";
  long witness_check = 0;
  bool with_witness = false;
};

int cmd_bounds(const BoundsArgs& a, const Common& c) {
  const auto spec = load_noise(a.noise, a.noise_file);
  const qpec::Channel gate = load_unitary(a.gate, qpec::noise_dim(spec));
  const auto report = bounds_for(spec, &gate);
  std::optional<qpec::WitnessCheckReport> check;
  if (a.witness_check > 0 && report.witness)
    check = qpec::witness_check(*report.witness, qpec::make_noise(spec), a.witness_check, require_seed(c), c.workers);
  if (c.json_out) {
    json j = qpec::io::to_json(report);
    if (!a.with_witness) j.erase("witness");
    j["noise"] = qpec::io::to_json(spec);
    if (check) j["witness_check"] = qpec::io::to_json(*check);
    print_json(j);
    return 0;
  }
  std::cout << "noise  " << qpec::describe(spec) << "\n"
            << "lower  " << fmt9(report.lower) << "  (" << report.method_lower << ")\n"
            << "upper  " << fmt9(report.upper) << "  (" << report.method_upper << ")\n";
  if (report.decomposition) print_decomposition(*report.decomposition);
  if (check)
    std::cout << "witness check: " << check->violations << " violations in " << check->n_samples << " draws, range ["
              << fmt9(check->min_val) << ", " << fmt9(check->max_val) << "]\n";
  return 0;
}

// --- decompose ------------------------------------------------------------

struct DecomposeArgs {
  std::string noise, noise_file, basis = "b16", target = "id", mode = "l1";
};

int cmd_decompose(const DecomposeArgs& a, const Common& c) {
  const auto spec = load_noise(a.noise, a.noise_file);
  const auto basis = qpec::basis_by_name(a.basis);
  if (basis.dim != qpec::noise_dim(spec))
    throw Error(Errc::invalid_dimension, "basis " + basis.name + " does not match the noise dimension");
  const qpec::Channel target = load_unitary(a.target, basis.dim);
  const auto ops = qpec::noisy_basis(qpec::make_noise(spec), basis.elements);
  qpec::QuasiDecomposition dec;
  if (a.mode == "exact") {
    dec = qpec::decompose_exact(target, ops);
  } else if (a.mode == "l1") {
    dec = qpec::decompose_l1(target, ops);
  } else {
    throw Error(Errc::parse_error, "--mode must be exact or l1");
  }
  if (c.json_out) {
    json j = qpec::io::to_json(dec);
    j["basis"] = basis.name;
    j["mode"] = a.mode;
    j["noise"] = qpec::io::to_json(spec);
    print_json(j);
  } else {
    print_decomposition(dec);
  }
  return 0;
}

// --- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string circuit, noise, noise_file, mode = "theorem", basis;
  long samples = 100000;
  bool shots_exact = false;
};

int cmd_simulate(const SimulateArgs& a, const Common& c) {
  const auto spec = load_noise(a.noise, a.noise_file);
  const qpec::Circuit circuit = qpec::io::circuit_from_json(qpec::io::read_json_file(a.circuit));
  if (circuit.dim != qpec::noise_dim(spec)) throw Error(Errc::invalid_dimension, "circuit and noise dimensions differ");
  const std::uint64_t seed = require_seed(c);
  const qpec::PecOptions options{c.workers, a.shots_exact};
  const qpec::Channel noise = qpec::make_noise(spec);

  qpec::PecResult result;
  if (a.mode == "general") {
    result = qpec::run_pec_general(circuit, qpec::to_general_form(spec), a.samples, seed, options);
  } else if (a.mode == "theorem" || a.mode == "lp") {
    std::vector<qpec::QuasiDecomposition> decs;
    std::optional<qpec::BasisSet> basis;
    if (a.mode == "lp") basis = qpec::basis_by_name(a.basis.empty() ? (circuit.dim == 4 ? "tq241" : "b13") : a.basis);
    const auto ops = basis ? qpec::noisy_basis(noise, basis->elements) : std::vector<qpec::Channel>{};
    for (const auto& g : circuit.gates) {
      if (basis) {
        decs.push_back(qpec::decompose_l1(g, ops));
      } else {
        if (std::holds_alternative<qpec::GeneralNoise>(spec) ||
            std::holds_alternative<qpec::GeneralizedDephasing>(spec))
          throw Error(Errc::invalid_input, "no closed-form decomposition for this noise; use --mode general or lp");
        decs.push_back(*bounds_for(spec, &g).decomposition);
      }
    }
    result = qpec::run_pec(circuit, decs, a.samples, seed, options);
  } else {
    throw Error(Errc::parse_error, "--mode must be theorem, general or lp");
  }

  const double ideal = qpec::ideal_expectation(circuit);
  const double noisy = qpec::noisy_expectation(circuit, noise);
  if (c.json_out) {
    json j = qpec::io::to_json(result);
    j["mode"] = a.mode;
    j["shots_exact"] = a.shots_exact;
    j["ideal_expectation"] = ideal;
    j["noisy_expectation"] = noisy;
    print_json(j);
    return 0;
  }
  std::cout << "estimate   " << fmt9(result.estimate) << " ± " << fmt9(result.std_error) << "\n"
            << "ideal      " << fmt9(ideal) << "\n"
            << "unmitigated " << fmt9(noisy) << "\n"
            << "gamma_tot  " << fmt9(result.gamma_tot) << "\n"
            << "samples    " << result.n_samples << " (seed " << result.seed << ")\n";
  if (a.shots_exact) std::cout << "note: --shots-exact uses Tr[A rho] per sample, not a physical measurement\n";
  if (result.truncated_draws > 0) std::cerr << "warning: " << result.truncated_draws << " series draws truncated\n";
  return 0;
}

// --- basis ----------------------------------------------------------------

struct BasisArgs {
  std::string set = "b16";
  bool check = false;
};

int cmd_basis(const BasisArgs& a, const Common& c) {
  const auto basis = qpec::basis_by_name(a.set);
  const int rank = qpec::rank_of(basis.elements);
  const int n = static_cast<int>(basis.elements.size());
  const bool ok = rank == n;
  if (c.json_out) {
    json j = qpec::io::to_json(basis);
    j["rank"] = rank;
    print_json(j);
  } else if (a.check) {
    std::cout << "rank " << rank << "/" << n << (ok ? " OK" : " FAIL") << "\n";
  } else {
    for (const auto& e : basis.elements) {
      const auto r = qpec::is_cptp(e);
      std::cout << e.label() << "\t" << (r.cp ? "CP" : "--") << " " << (r.tp ? "TP" : "TNI") << "\n";
    }
    std::cout << "rank " << rank << "/" << n << "\n";
  }
  return a.check && !ok ? 3 : 0;
}

// --- sweep ----------------------------------------------------------------

struct SweepArgs {
  std::string noise, range, basis, out;
};

struct Range {
  double start, stop, step;
};

Range parse_range(const std::string& text) {
  std::vector<double> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t colon = text.find(':', pos);
    const std::string item = text.substr(pos, colon == std::string::npos ? std::string::npos : colon - pos);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size())
      throw Error(Errc::parse_error, "range must be start:stop:step");
    parts.push_back(v);
    if (colon == std::string::npos) break;
    pos = colon + 1;
  }
  if (parts.size() != 3) throw Error(Errc::parse_error, "range must be start:stop:step");
  if (!(parts[2] > 0.0)) throw Error(Errc::parse_error, "range step must be positive");
  return {parts[0], parts[1], parts[2]};
}

int cmd_sweep(const SweepArgs& a, const Common&) {
  const auto templ = qpec::io::parse_noise_template(a.noise);
  const Range r = parse_range(a.range);
  const int d = qpec::noise_dim(templ);
  std::string basis_name = a.basis.empty() ? (d == 2 ? "b13" : "none") : a.basis;
  std::optional<qpec::BasisSet> basis;
  if (basis_name != "none") basis = qpec::basis_by_name(basis_name);
  if (basis && basis->dim != d) throw Error(Errc::invalid_dimension, "sweep basis does not match the noise dimension");

  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw Error(Errc::parse_error, "cannot write '" + a.out + "'");
  }
  std::ostream& out = a.out.empty() ? std::cout : file;
  out << "eps,lower,upper,lp_gamma\n";
  const long n = r.stop < r.start ? 0 : static_cast<long>(std::floor((r.stop - r.start) / r.step + 1e-9)) + 1;
  const qpec::Channel id = qpec::identity_channel(d);
  for (long k = 0; k < n; ++k) {
    // Snap away accumulated drift so 0.1-steps print as 0.3, not 0.30000000000000004.
    char snapped[32];
    std::snprintf(snapped, sizeof snapped, "%.12g", r.start + static_cast<double>(k) * r.step);
    const double eps = std::strtod(snapped, nullptr);
    qpec::BoundsReport b;
    std::string lp;
    try {
      const auto spec = qpec::io::with_eps(templ, eps);
      b = bounds_for(spec, &id);
      if (basis) lp = exact(qpec::decompose_l1(id, qpec::noisy_basis(qpec::make_noise(spec), basis->elements)).gamma());
    } catch (const Error& e) {
      if (!qpec::is_domain_error(e.code())) throw;
      std::cerr << "warning: eps=" << exact(eps) << " is outside the valid domain (" << e.what()
                << "); sweep truncated after " << k << " rows\n";
      break;
    }
    out << exact(eps) << "," << exact(b.lower) << "," << exact(b.upper) << "," << lp << "\n";
  }
  return 0;
}

int exit_code_for(Errc code) {
  if (code == Errc::parse_error) return 1;
  return qpec::is_domain_error(code) ? 2 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qpec: optimal quasiprobability decompositions for probabilistic error cancellation"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool randomized) {
    sub->add_flag("--json", common.json_out, "Machine-readable JSON output");
    if (randomized) {
      sub->add_option("--seed", common.seed, "RNG seed (default: $QPEC_SEED)");
      sub->add_option("--workers", common.workers, "Worker threads")->check(CLI::PositiveNumber);
    }
  };

  BoundsArgs bounds;
  auto* b = app.add_subcommand("bounds", "Lower and upper bounds on the optimal cost");
  b->add_option("--noise", bounds.noise, "Noise preset, e.g. dephasing:eps=0.25, or noise JSON");
  b->add_option("--noise-file", bounds.noise_file, "Noise JSON file");
  b->add_option("--gate", bounds.gate, "Target gate: id, x, h, t, cnot, ... or a matrix JSON file");
  b->add_option("--witness-check", bounds.witness_check, "Random draws for the witness feasibility check");
  b->add_flag("--witness", bounds.with_witness, "Include the witness matrix in JSON output");
  add_common(b, true);

  DecomposeArgs decompose;
  auto* d = app.add_subcommand("decompose", "Quasiprobability decomposition over a noised basis");
  d->add_option("--noise", decompose.noise, "Noise preset or noise JSON");
  d->add_option("--noise-file", decompose.noise_file, "Noise JSON file");
  d->add_option("--basis", decompose.basis, "b16, b13 or tq241")->capture_default_str();
  d->add_option("--target", decompose.target, "id, a named gate or a matrix JSON file")->capture_default_str();
  d->add_option("--mode", decompose.mode, "exact or l1")->capture_default_str();
  add_common(d, false);

  SimulateArgs simulate;
  auto* s = app.add_subcommand("simulate", "Monte Carlo probabilistic error cancellation");
  s->add_option("--circuit", simulate.circuit, "Circuit JSON file")->required();
  s->add_option("--noise", simulate.noise, "Noise preset or noise JSON");
  s->add_option("--noise-file", simulate.noise_file, "Noise JSON file");
  s->add_option("--mode", simulate.mode, "theorem, general or lp")->capture_default_str();
  s->add_option("--basis", simulate.basis, "Basis for lp mode (default b13, tq241 for two qubits)");
  s->add_option("--samples", simulate.samples, "Number of samples")->check(CLI::PositiveNumber)->capture_default_str();
  s->add_flag("--shots-exact", simulate.shots_exact, "Use Tr[A rho] instead of a single-shot outcome (non-physical)");
  add_common(s, true);

  BasisArgs basis;
  auto* bs = app.add_subcommand("basis", "Inspect a universal basis");
  bs->add_option("--set", basis.set, "b16, b13 or tq241")->capture_default_str();
  bs->add_flag("--check", basis.check, "Only verify linear independence");
  add_common(bs, false);

  SweepArgs sweep;
  auto* sw = app.add_subcommand("sweep", "CSV of bounds (and LP cost) over a range of eps");
  sw->add_option("--noise", sweep.noise, "Noise template, e.g. dephasing or depolarizing:d=2")->required();
  sw->add_option("--eps", sweep.range, "Inclusive range start:stop:step")->required();
  sw->add_option("--basis", sweep.basis, "Basis for the LP column, or none (default b13 for qubits)");
  sw->add_option("--out", sweep.out, "Output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*b) return cmd_bounds(bounds, common);
    if (*d) return cmd_decompose(decompose, common);
    if (*s) return cmd_simulate(simulate, common);
    if (*bs) return cmd_basis(basis, common);
    if (*sw) return cmd_sweep(sweep, common);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: parse-error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
