# Copyright 2026 The qpec Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""End-to-end tests of the qpec command-line tool."""

import csv
import io
import json
import math
import os
import pathlib
import subprocess

import jsonschema
import pytest
from referencing import Registry, Resource

BIN = os.environ.get("QPEC_BIN", "qpec")
ROOT = pathlib.Path(os.environ.get("QPEC_ROOT", pathlib.Path(__file__).resolve().parents[2]))
SAMPLES = ROOT / "samples"
SCHEMAS = ROOT / "schemas"


def run(*args, seed=None, env_seed=None):
    env = {k: v for k, v in os.environ.items() if k != "QPEC_SEED"}
    if env_seed is not None:
        env["QPEC_SEED"] = str(env_seed)
    cmd = [BIN, *map(str, args)]
    if seed is not None:
        cmd += ["--seed", str(seed)]
    return subprocess.run(cmd, capture_output=True, text=True, env=env, timeout=300)


def ok(*args, **kw):
    r = run(*args, **kw)
    assert r.returncode == 0, r.stderr
    return r.stdout


def ok_json(*args, **kw):
    return json.loads(ok(*args, "--json", **kw))


@pytest.fixture(scope="session")
def registry():
    resources = []
    for path in SCHEMAS.glob("*.json"):
        schema = json.loads(path.read_text())
        resources.append((schema["$id"], Resource.from_contents(schema)))
    return Registry().with_resources(resources)


def check_schema(registry, name, instance):
    schema = registry.contents(f"https://qpec.example/schemas/{name}.json")
    jsonschema.Draft202012Validator(schema, registry=registry).validate(instance)


def sweep_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


# bounds


def test_bounds_dephasing_quarter():
    out = ok("bounds", "--noise", "dephasing:eps=0.25")
    assert "lower  2  " in out and "upper  2  " in out


def test_bounds_noiseless_depolarizing():
    j = ok_json("bounds", "--noise", "depolarizing:d=2,eps=0")
    assert j["lower"] == pytest.approx(1.0, abs=1e-12)
    assert j["upper"] == pytest.approx(1.0, abs=1e-12)


def test_bounds_amplitude_damping_json(registry):
    j = ok_json("bounds", "--noise", "ad:eps=0.1")
    assert j["lower"] == pytest.approx(1.1096481, abs=5e-8)
    assert j["upper"] == pytest.approx(1.2222222, abs=5e-8)
    check_schema(registry, "bounds_report", j)


def test_bounds_witness_and_check(registry):
    j = ok_json("bounds", "--noise", "dephasing:eps=0.1", "--witness", "--witness-check", "500", seed=5)
    assert j["witness_check"]["violations"] == 0
    assert j["witness"]["y"]["rows"] == 4
    check_schema(registry, "bounds_report", j)


def test_bounds_general_noise_file(registry):
    j = ok_json("bounds", "--noise-file", SAMPLES / "ad_general_0.1.json")
    assert j["lower"] == pytest.approx((math.sqrt(0.9) + 0.05) / 0.9, abs=1e-9)
    assert j["upper"] == pytest.approx(1.25, abs=1e-12)
    check_schema(registry, "bounds_report", j)
    check_schema(registry, "noise", j["noise"])


def test_bounds_noise_json_roundtrip():
    spec = ok_json("bounds", "--noise", "gdeph:axis=pi8,eps=0.1")["noise"]
    again = ok_json("bounds", "--noise", json.dumps(spec))
    assert again["noise"] == spec


# sweep


def test_sweep_dephasing_rows():
    rows = sweep_rows(ok("sweep", "--noise", "dephasing", "--eps", "0:0.4:0.1"))
    assert [float(r["eps"]) for r in rows] == pytest.approx([0.0, 0.1, 0.2, 0.3, 0.4])
    assert float(rows[-1]["lower"]) == pytest.approx(5.0, abs=1e-12)
    assert float(rows[-1]["upper"]) == pytest.approx(5.0, abs=1e-12)


def test_sweep_empty_range_is_header_only():
    assert ok("sweep", "--noise", "dephasing", "--eps", "0.3:0.1:0.1") == "eps,lower,upper,lp_gamma\n"


def test_sweep_depolarizing_matches_lp():
    rows = sweep_rows(ok("sweep", "--noise", "depolarizing:d=2", "--eps", "0:0.3:0.05"))
    assert len(rows) == 7
    for r in rows:
        assert float(r["lp_gamma"]) == pytest.approx(float(r["upper"]), abs=1e-9)
        assert float(r["lower"]) == pytest.approx(float(r["upper"]), abs=1e-9)


def test_sweep_truncates_outside_domain(tmp_path):
    out = tmp_path / "sweep.csv"
    r = run("sweep", "--noise", "dephasing", "--eps", "0.3:0.7:0.1", "--out", out)
    assert r.returncode == 0
    assert "warning" in r.stderr
    assert len(sweep_rows(out.read_text())) == 2


# basis and decompose


@pytest.mark.parametrize("name,n", [("b13", 13), ("b16", 16)])
def test_basis_check(name, n):
    assert ok("basis", "--set", name, "--check").strip() == f"rank {n}/{n} OK"


def test_basis_json(registry):
    j = ok_json("basis", "--set", "b13")
    assert j["rank"] == 13 and len(j["elements"]) == 13
    check_schema(registry, "basis_set", j)


def test_decompose_generalized_dephasing(registry):
    out = ok("decompose", "--noise", "gdeph:axis=pi8,eps=0.1", "--basis", "b16", "--mode", "l1")
    assert out.splitlines()[0] == "gamma 1.3017767"
    j = ok_json("decompose", "--noise", "gdeph:axis=pi8,eps=0.1", "--basis", "b16", "--mode", "l1")
    assert j["gamma"] == pytest.approx(1.3017767, abs=1e-7)
    check_schema(registry, "decomposition", j)


def test_decompose_exact_matches_l1_on_independent_basis():
    a = ok_json("decompose", "--noise", "depolarizing:d=2,eps=0.1", "--basis", "b13", "--mode", "exact")
    b = ok_json("decompose", "--noise", "depolarizing:d=2,eps=0.1", "--basis", "b13", "--mode", "l1")
    assert a["gamma"] == pytest.approx(7 / 6, abs=1e-9)
    assert b["gamma"] == pytest.approx(a["gamma"], abs=1e-9)


def test_decompose_two_qubit_target():
    j = ok_json("decompose", "--noise", "depolarizing:d=4,eps=0.01", "--basis", "tq241", "--target", "id")
    assert j["gamma"] == pytest.approx((1 + 0.875 * 0.01) / 0.99, abs=1e-9)


# simulate


def test_simulate_dephasing_example(registry):
    j = ok_json("simulate", "--circuit", SAMPLES / "dephasing_plus.json", "--noise", "dephasing:eps=0.25",
                "--samples", 200000, seed=42)
    assert j["gamma_tot"] == pytest.approx(2.0, abs=1e-12)
    assert j["noisy_expectation"] == pytest.approx(0.5, abs=1e-12)
    assert abs(j["estimate"] - 1.0) < 5 * j["std_error"]
    check_schema(registry, "pec_result", j)


def test_simulate_table_output():
    out = ok("simulate", "--circuit", SAMPLES / "dephasing_plus.json", "--noise", "dephasing:eps=0.25",
             "--samples", 1000, seed=1)
    assert out.startswith("estimate ") and " ± " in out


@pytest.mark.parametrize("mode,noise", [("general", "ad:eps=0.1"), ("lp", "depolarizing:d=2,eps=0.1"),
                                        ("theorem", "ad:eps=0.1")])
def test_simulate_modes_unbiased(registry, mode, noise):
    j = ok_json("simulate", "--circuit", SAMPLES / "h_t_h.json", "--noise", noise, "--mode", mode,
                "--samples", 200000, seed=11)
    assert abs(j["estimate"] - j["ideal_expectation"]) < 5 * j["std_error"]
    check_schema(registry, "pec_result", j)


def test_simulate_two_qubit():
    j = ok_json("simulate", "--circuit", SAMPLES / "bell_zz.json", "--noise", "depolarizing:d=4,eps=0.05",
                "--samples", 50000, seed=3)
    assert abs(j["estimate"] - 1.0) < 5 * j["std_error"]


def test_simulate_deterministic_and_worker_independent():
    args = ("simulate", "--circuit", SAMPLES / "h_t_h.json", "--noise", "depolarizing:d=2,eps=0.1",
            "--samples", 30000, "--json")
    a = ok(*args, seed=9)
    assert ok(*args, seed=9) == a
    assert ok(*args, "--workers", 3, seed=9) == a
    assert ok(*args, env_seed=9) == a
    assert ok(*args, seed=10) != a


def test_circuit_sample_matches_schema(registry):
    for path in SAMPLES.glob("*.json"):
        data = json.loads(path.read_text())
        check_schema(registry, "circuit" if "gates" in data else "noise", data)


# exit codes


@pytest.mark.parametrize("args", [
    ("bounds", "--noise", "nosuch:eps=0.1"),
    ("bounds", "--noise", "dephasing:eps=0.1,eps=0.2"),
    ("bounds", "--bogus"),
    ("sweep", "--noise", "dephasing", "--eps", "0:1:0"),
    ("simulate", "--circuit", "missing.json", "--noise", "dephasing:eps=0.1", "--seed", "1"),
])
def test_exit_code_parse_error(args):
    assert run(*args).returncode == 1


def test_missing_seed_is_parse_error():
    r = run("simulate", "--circuit", SAMPLES / "dephasing_plus.json", "--noise", "dephasing:eps=0.1")
    assert r.returncode == 1 and "seed" in r.stderr


@pytest.mark.parametrize("args", [
    ("bounds", "--noise", "dephasing:eps=0.6"),
    ("bounds", "--noise", "depolarizing:d=2,eps=-0.1"),
    ("decompose", "--noise", "depolarizing:d=2,eps=0.1", "--basis", "tq241"),
])
def test_exit_code_domain_error(args):
    assert run(*args).returncode == 2


@pytest.mark.parametrize("mode", ["exact", "l1"])
def test_exit_code_numerical_failure(mode):
    r = run("decompose", "--noise", "dephasing:eps=0.5", "--mode", mode)
    assert r.returncode == 3
    assert r.stderr.startswith("error: ")
