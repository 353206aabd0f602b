"""End-to-end acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line and records it for the summary
printed at the end of the pytest run. Scenario runs use the default config
with seed 0; each scenario is run twice so criterion 10 can compare them.
"""

import json
import time

import numpy as np
import pytest
from scipy.linalg import expm

from bqss import cli
from bqss import mixer as mx
from bqss import qstate as qs
from bqss import separator as sp
from bqss.scenarios import SCENARIOS, ExperimentConfig
from conftest import ACCEPTANCE_RESULTS

_RUNS: dict = {}


def scenario(name):
    """First and second run of a scenario: ``(report, result, seconds)`` each."""
    if name not in _RUNS:
        runs = []
        for _ in range(2):
            start = time.perf_counter()
            report, result = cli.run(ExperimentConfig(scenario=name, seed=0))
            runs.append((report, result, time.perf_counter() - start))
        _RUNS[name] = runs
    return _RUNS[name]


def check(number, title, ok, detail):
    ACCEPTANCE_RESULTS[number] = (bool(ok), f"{title}: {detail}")
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}: {detail}")
    assert ok, detail


def summary_of(name):
    return scenario(name)[0][0]["summary"]


def test_criterion_01_equivalence():
    report, result, seconds = scenario("criterion-equivalence")[0]
    s = report["summary"]
    ok = (s["product_max_tangle"] < 1e-12 and s["product_max_purity_deviation"] <= 1e-12
          and s["amplitude_disagreements"] == 0 and seconds < 5.0)
    check(1, "criterion equivalence", ok,
          f"product max tangle {s['product_max_tangle']:.2e}, purity dev {s['product_max_purity_deviation']:.2e}, "
          f"disagreements {s['amplitude_disagreements']}, {seconds:.2f} s")


def test_criterion_02_probability_triplet():
    report, result, _ = scenario("criterion-equivalence")[0]
    states = sum(r["states"] for r in report["records"])
    dis = report["summary"]["probability_disagreements"]
    check(2, "probability triplet", states == 20_000 and dis == 0, f"{dis} disagreements over {states} states")


def test_criterion_03_counterexample():
    report, result, _ = scenario("counterexample")[0]
    quads = {r["setting"]: np.array(r["quad"]) for r in report["records"]}
    gaps = {r["setting"]: r["product_gap"] for r in report["records"]}
    s = report["summary"]
    ok = (np.all(quads["xx"] == 0.25) and np.all(quads["yy"] == 0.25)
          and s["same_component_criterion"] and s["tangle"] == 0.5
          and abs(gaps["zx"]) == 0.25 and not s["probability_criterion"] and report["passed"])
    check(3, "counterexample", ok,
          f"xx {quads['xx'].tolist()}, yy {quads['yy'].tolist()}, tangle {s['tangle']!r}, "
          f"|zx gap| {abs(gaps['zx'])!r}")


def test_criterion_04_reconstruction():
    report, result, seconds = scenario("reconstruction")[0]
    s = report["summary"]
    exact = [r["fidelity"] for r in report["records"] if r["mode"] == "exact"]
    ok = (len(exact) == 1000 and min(exact) >= 1 - 1e-12 and s["samples_per_setting"] == 1_000_000
          and s["sampled_fraction_above_0.995"] >= 0.95 and seconds < 60.0)
    check(4, "reconstruction", ok,
          f"exact min fidelity {min(exact):.16f}, sampled fraction >= 0.995: "
          f"{s['sampled_fraction_above_0.995']:.3f}, {seconds:.1f} s")


def test_criterion_05_closed_forms():
    s = summary_of("mixing-closed-form")
    ok = s["max_deviation"] < 1e-12 and s["grid_points"] == 10_000
    check(5, "mixing closed forms", ok, f"max deviation {s['max_deviation']:.2e} over {s['grid_points']} points")


def test_criterion_06_ising():
    report, result, _ = scenario("ising-invariance")[0]
    s = report["summary"]
    sources = {row["source"] for row in result.table}
    ok = (len(report["records"]) == 50 and len(sources) == 20
          and s["max_product_gap"] < 1e-12 and s["min_tangle_nontrivial"] > 1e-3)
    check(6, "ising invariance", ok,
          f"max |p1p4 - p2p3| {s['max_product_gap']:.2e}, min tangle away from k pi {s['min_tangle_nontrivial']:.3e}")


def test_criterion_07_unmixer_identities():
    q = mx.q_matrix()
    q_err = float(np.max(np.abs(q @ q - np.eye(4))))
    rng = np.random.Generator(np.random.Philox(7))
    worst_expm, worst_fid = 0.0, 1.0
    for _ in range(100):
        p = mx.CouplingParams(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0, 3))
        m = expm(-1j * mx.hamiltonian(p) * p.dt)
        worst_expm = max(worst_expm, float(np.max(np.abs(mx.mixing_matrix(p) - m))))
        psi = qs.random_pair_states(rng, 1)[0]
        out = sp.unmix(mx.mix(psi, p), mx.omega_frequencies(p) * p.dt)
        worst_fid = min(worst_fid, qs.overlap(psi, out))
    ok = q_err <= 2 * np.finfo(float).eps and worst_expm <= 1e-10 and worst_fid >= 1 - 1e-12
    check(7, "unmixer identities", ok,
          f"|Q^2 - I| {q_err:.1e}, QDQ vs expm {worst_expm:.1e}, min fidelity {worst_fid:.16f}")


def test_criterion_08_adaptation():
    report, result, seconds = scenario("adaptation")[0]
    s = report["summary"]
    r1, r2 = s["delta_residuals"]
    cfg = report["config"]
    ok = (cfg["restarts"] == 8 and cfg["batch_size"] == 32 and s["final_cost"] <= 1e-10
          and r1 < 1e-5 and r2 < 1e-5 and s["held_out_max_tangle"] < 1e-8 and seconds < 120.0)
    check(8, "blind adaptation", ok,
          f"best cost {s['final_cost']:.2e}, residuals ({r1:.1e}, {r2:.1e}), "
          f"held-out max tangle {s['held_out_max_tangle']:.1e}, {seconds:.2f} s")


def test_criterion_09_ensemble_density():
    report, result, _ = scenario("ensemble-density")[0]
    s = report["summary"]
    ok = len(report["records"]) == 100 and s["max_difference"] <= 1e-12
    check(9, "ensemble density", ok, f"max two-path difference {s['max_difference']:.1e} over 100 ensembles")


def test_criterion_10_determinism():
    mismatched = []
    for name in SCENARIOS:
        (a, res_a, _), (b, res_b, _) = scenario(name)
        bodies = [json.dumps(cli._sanitize({k: v for k, v in r.items() if k != "timing"}), sort_keys=True,
                             default=cli._json_default) for r in (a, b)]
        tables = [json.dumps(cli._sanitize(r.table), default=cli._json_default) for r in (res_a, res_b)]
        if bodies[0] != bodies[1] or tables[0] != tables[1]:
            mismatched.append(name)
    check(10, "determinism", not mismatched,
          f"{len(SCENARIOS) - len(mismatched)}/{len(SCENARIOS)} scenarios identical on re-run"
          + (f"; differing: {mismatched}" if mismatched else ""))


@pytest.mark.parametrize("name", list(SCENARIOS))
def test_every_scenario_passes(name):
    assert scenario(name)[0][0]["passed"]
