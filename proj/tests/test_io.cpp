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

#include "qpec/io.hpp"
#include "test_util.hpp"

namespace {

using namespace qpec;
using qpec::io::json;
using qpec::testing::near;
namespace g = qpec::gates;

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::solver_failure;
}

TEST(MatrixJson, RowMajorPairs) {
  ComplexMatrix m(2, 3);
  m << Complex(1, 2), Complex(3, 0), Complex(0, -1), Complex(4, 4), Complex(5, 0), Complex(6, 0.5);
  const json j = io::to_json(m);
  EXPECT_EQ(j["rows"], 2);
  EXPECT_EQ(j["cols"], 3);
  EXPECT_EQ(j["data"][2][1].get<double>(), -1.0);
  EXPECT_EQ(j["data"][3][0].get<double>(), 4.0);
  EXPECT_TRUE(near(io::matrix_from_json(j), m, 0.0));
}

TEST(MatrixJson, LosslessThroughText) {
  SplitMix64 rng(3);
  const ComplexMatrix m = ginibre(4, 4, rng);
  EXPECT_TRUE(near(io::matrix_from_json(json::parse(io::to_json(m).dump())), m, 0.0));
}

TEST(MatrixJson, Malformed) {
  EXPECT_EQ(code_of([] { io::matrix_from_json(json::parse(R"({"rows":2,"cols":2,"data":[[1,0]]})")); }),
            Errc::parse_error);
  EXPECT_EQ(code_of([] { io::matrix_from_json(json::parse(R"({"rows":1,"cols":1,"data":[["a",0]]})")); }),
            Errc::parse_error);
  EXPECT_EQ(code_of([] { io::matrix_from_json(json::parse(R"({"cols":1,"data":[]})")); }), Errc::parse_error);
}

TEST(ChannelJson, RoundTripWithAndWithoutKraus) {
  const Channel ad = make_noise(AmplitudeDamping{0.3});
  const Channel back = io::channel_from_json(io::to_json(ad));
  EXPECT_EQ(back.label(), "A");
  EXPECT_TRUE(near(back.superop(), ad.superop(), 0.0));
  json bare = io::to_json(ad);
  bare.erase("kraus");
  EXPECT_TRUE(near(io::channel_from_json(bare).superop(), ad.superop(), 1e-12));
}

TEST(ChannelJson, Inconsistent) {
  json j = io::to_json(make_noise(AmplitudeDamping{0.3}));
  j["superop"] = io::to_json(ComplexMatrix::Identity(4, 4));
  EXPECT_EQ(code_of([&] { io::channel_from_json(j); }), Errc::invalid_input);
}

TEST(NoisePresets, Parse) {
  const auto dep = std::get<Depolarizing>(io::parse_noise("depolarizing:d=4,eps=0.01"));
  EXPECT_EQ(dep.d, 4);
  EXPECT_DOUBLE_EQ(dep.eps, 0.01);
  EXPECT_EQ(std::get<Depolarizing>(io::parse_noise("depolarizing:eps=0.1")).d, 2);
  EXPECT_DOUBLE_EQ(std::get<Dephasing>(io::parse_noise("dephasing:eps=0.25")).eps, 0.25);
  EXPECT_DOUBLE_EQ(std::get<AmplitudeDamping>(io::parse_noise("ad:eps=0.1")).eps, 0.1);
  const auto gd = std::get<GeneralizedDephasing>(io::parse_noise("gdeph:axis=pi8,eps=0.1"));
  EXPECT_DOUBLE_EQ(gd.axis[0], std::cos(std::numbers::pi / 8));
  EXPECT_DOUBLE_EQ(gd.axis[2], std::sin(std::numbers::pi / 8));
  const auto gn = std::get<GeneralNoise>(io::parse_noise("adgen:delta=0.1"));
  EXPECT_DOUBLE_EQ(gn.eps_plus, 0.1);
}

TEST(NoisePresets, ParseErrors) {
  for (const char* bad : {"nosuch:eps=0.1", "dephasing:eps=abc", "dephasing:eps", "dephasing:eps=0.1,foo=2",
                          "dephasing:eps=0.1,eps=0.2", "gdeph:axis=w,eps=0.1", "{not json"}) {
    EXPECT_EQ(code_of([&] { io::parse_noise(bad); }), Errc::parse_error) << bad;
  }
}

TEST(NoisePresets, JsonRoundTripIsLossless) {
  const std::vector<NoiseSpec> specs{Depolarizing{4, 0.1 / 3.0}, Dephasing{0.1}, AmplitudeDamping{std::sqrt(0.02)},
                                     GeneralizedDephasing{{0.1, 0.2, 0.3}, 1.0 / 7.0},
                                     amplitude_damping_general_form(0.1)};
  for (const auto& spec : specs) {
    const json j = io::to_json(spec);
    const NoiseSpec back = io::noise_from_json(json::parse(j.dump()));
    EXPECT_EQ(io::to_json(back), j) << j.dump();
    EXPECT_TRUE(near(make_noise(back).superop(), make_noise(spec).superop(), 1e-12)) << describe(spec);
    // Text form accepts the same JSON.
    EXPECT_EQ(io::to_json(io::parse_noise(j.dump())), j);
  }
}

TEST(NoisePresets, TemplatesAndSweeps) {
  const auto t = io::parse_noise_template("dephasing");
  EXPECT_DOUBLE_EQ(std::get<Dephasing>(io::with_eps(t, 0.3)).eps, 0.3);
  EXPECT_EQ(std::get<Depolarizing>(io::parse_noise_template("depolarizing:d=4")).d, 4);
  EXPECT_EQ(code_of([] { io::with_eps(amplitude_damping_general_form(0.1), 0.2); }), Errc::invalid_spec);
}

TEST(CircuitJson, RoundTrip) {
  Circuit c;
  c.dim = 2;
  c.input_state = g::projector(g::ket_plus());
  c.observable = g::pauli_x();
  c.gates = {unitary_channel(g::hadamard(), "H"), unitary_channel(g::t_gate(), "T")};
  const Circuit back = io::circuit_from_json(json::parse(io::to_json(c).dump()));
  EXPECT_EQ(back.gates.size(), 2u);
  EXPECT_NEAR(ideal_expectation(back), ideal_expectation(c), 1e-15);
}

TEST(CircuitJson, RejectsNonUnitaryGates) {
  json j = {{"dim", 2},
            {"input", io::to_json(g::projector(g::ket0()))},
            {"gates", json::array({io::to_json(g::projector0())})},
            {"observable", io::to_json(g::pauli_z())}};
  EXPECT_EQ(code_of([&] { io::circuit_from_json(j); }), Errc::invalid_input);
  j["gates"] = json::array({io::to_json(g::cnot())});
  EXPECT_EQ(code_of([&] { io::circuit_from_json(j); }), Errc::invalid_dimension);
}

TEST(ReportJson, Fields) {
  const auto dec = *gamma_dephasing(0.25).decomposition;
  const json jd = io::to_json(dec);
  EXPECT_DOUBLE_EQ(jd["gamma"].get<double>(), 2.0);
  EXPECT_EQ(jd["terms"].size(), 2u);
  EXPECT_EQ(jd["terms"][1]["label"], "F∘Z∘U");

  const json jb = io::to_json(gamma_amplitude_damping(0.1));
  EXPECT_NEAR(jb["lower"].get<double>(), 1.1096481, 1e-7);
  EXPECT_NEAR(jb["upper"].get<double>(), 1.2222222, 1e-7);
  EXPECT_TRUE(jb.contains("witness"));

  PecResult r;
  r.estimate = 0.1;
  r.seed = 18446744073709551615ull;
  const json jp = io::to_json(r);
  EXPECT_EQ(jp["seed"].get<std::uint64_t>(), 18446744073709551615ull);

  const json jbasis = io::to_json(basis_b13());
  EXPECT_EQ(jbasis["elements"].size(), 13u);
  EXPECT_EQ(jbasis["elements"][12]["label"], "B13:P|0>");
}

}  // namespace
