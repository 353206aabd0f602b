"""Named experiments with pass/fail checks.

Each scenario takes an :class:`ExperimentConfig` and returns a
:class:`ScenarioResult`. The thresholds are the library's documented
tolerances; no scenario introduces new math of its own.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from . import measurement as ms
from . import mixer as mx
from . import qstate as qs
from . import separator as sp
from . import sources as src


@dataclass
class ExperimentConfig:
    scenario: str = "counterexample"
    seed: int = 0
    trials: Optional[int] = None  # scenario default when None
    samples_per_setting: int = 1_000_000
    sampled_trials: int = 200
    time_points: int = 50
    j_z: float = 0.9
    j_xy: float = 1.7
    dt: float = 1.3
    theta_law: str = "sphere"
    phi_law: str = "uniform"
    restarts: int = 8
    batch_size: int = 32
    max_iterations: int = 20000
    target: Optional[float] = None
    cost: str = "amplitude"
    output: Optional[str] = None
    table: Optional[str] = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}; choose from {sorted(SCENARIOS)}")
        for name in ("samples_per_setting", "sampled_trials", "time_points", "restarts",
                     "batch_size", "max_iterations"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.trials is not None and self.trials < 1:
            raise ValueError("trials must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        # fail early on bad laws / couplings
        self.distribution()
        self.coupling()
        self.adapt_config()

    def coupling(self) -> mx.CouplingParams:
        return mx.CouplingParams(self.j_z, self.j_xy, self.dt)

    def distribution(self) -> src.DirectionDistribution:
        return src.DirectionDistribution(src.law_from_spec(self.theta_law), src.law_from_spec(self.phi_law))

    def adapt_config(self) -> sp.AdaptConfig:
        return sp.AdaptConfig(restarts=self.restarts, batch_size=self.batch_size,
                              max_iterations=self.max_iterations, target=self.target, cost=self.cost,
                              samples_per_setting=min(self.samples_per_setting, 100_000))

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("output")
        d.pop("table")
        return d


@dataclass
class Check:
    name: str
    value: float
    threshold: float
    relation: str  # "<", "<=", ">=", ">", "=="

    @property
    def passed(self) -> bool:
        v, t = self.value, self.threshold
        return {"<": v < t, "<=": v <= t, ">=": v >= t, ">": v > t, "==": v == t}[self.relation]

    def as_dict(self) -> dict:
        return {"name": self.name, "value": _clean(self.value), "threshold": self.threshold,
                "relation": self.relation, "passed": self.passed}


@dataclass
class ScenarioResult:
    records: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    table: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _clean(x):
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return None if not np.isfinite(x) else x
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def criterion_equivalence(cfg: ExperimentConfig) -> ScenarioResult:
    n = cfg.trials or 10_000
    dist = cfg.distribution()
    products = src.source_state(src.sample_sources(dist, dist, n, cfg.seed))
    generic = qs.random_pair_states(_rng(cfg.seed, 1), n)
    out = ScenarioResult()
    disagree_amp = 0
    disagree_prob = 0
    for kind, states in (("product", products), ("generic", generic)):
        t = qs.tangle(states)
        pur = qs.purity_partial_trace(states)
        nschmidt = qs.schmidt_number(states, 1e-10)
        unent = t <= 1e-10
        by_purity = np.abs(pur - 1.0) <= 1e-10
        by_schmidt = nschmidt == 1
        quads = [ms.outcome_probabilities(states, s) for s in ("zz", "zx", "zy")]
        by_prob = ms.probability_criterion(*quads, tol=1e-10)
        disagree_amp += int(np.sum((unent != by_purity) | (unent != by_schmidt)))
        disagree_prob += int(np.sum(unent != by_prob))
        out.summary[f"{kind}_max_tangle"] = float(t.max())
        out.summary[f"{kind}_min_tangle"] = float(t.min())
        out.summary[f"{kind}_max_purity_deviation"] = float(np.max(np.abs(pur - 1.0)))
        out.summary[f"{kind}_unentangled"] = int(unent.sum())
        for i in range(n):
            out.table.append({"trial": i, "kind": kind, "tangle": float(t[i]), "purity": float(pur[i]),
                              "schmidt_number": int(nschmidt[i]), "unentangled": bool(unent[i]),
                              "probability_criterion": bool(by_prob[i])})
    out.records = [{"kind": k, "states": n} for k in ("product", "generic")]
    out.summary["amplitude_disagreements"] = disagree_amp
    out.summary["probability_disagreements"] = disagree_prob
    out.checks = [
        Check("product_max_tangle", out.summary["product_max_tangle"], 1e-12, "<"),
        Check("product_max_purity_deviation", out.summary["product_max_purity_deviation"], 1e-12, "<="),
        Check("amplitude_purity_schmidt_disagreements", disagree_amp, 0, "=="),
        Check("probability_criterion_disagreements", disagree_prob, 0, "=="),
    ]
    return out


def counterexample(cfg: ExperimentConfig) -> ScenarioResult:
    psi = qs.PSI_I_MI_1_1
    quads = {s: ms.outcome_probabilities(psi, s) for s in ("zz", "xx", "yy", "zx", "zy")}
    gaps = {s: float(ms.product_gap(q)) for s, q in quads.items()}
    out = ScenarioResult()
    out.records = [{"setting": s, "quad": [float(p) for p in q], "product_gap": gaps[s]}
                   for s, q in quads.items()]
    out.table = [dict(r, quad=" ".join(f"{p:.17g}" for p in r["quad"])) for r in out.records]
    same = ms.same_component_criterion(quads["zz"], quads["xx"], quads["yy"], 1e-10)
    prob = ms.probability_criterion(quads["zz"], quads["zx"], quads["zy"], 1e-10)
    t = qs.tangle(psi)
    out.summary = {"tangle": t, "same_component_criterion": same, "probability_criterion": prob}
    out.checks = [
        Check("xx_quad_max_deviation_from_quarter", float(np.max(np.abs(quads["xx"] - 0.25))), 0.0, "=="),
        Check("yy_quad_max_deviation_from_quarter", float(np.max(np.abs(quads["yy"] - 0.25))), 0.0, "=="),
        Check("same_component_tests_pass", float(same), 1.0, "=="),
        Check("tangle_deviation_from_half", abs(t - 0.5), 0.0, "=="),
        Check("zx_gap_deviation_from_quarter", abs(abs(gaps["zx"]) - 0.25), 0.0, "=="),
        Check("probability_criterion_rejects", float(prob), 0.0, "=="),
    ]
    return out


def _moduli_bounded_state(rng: np.random.Generator, floor: float) -> np.ndarray:
    while True:
        psi = qs.random_pair_states(rng, 1)[0]
        if np.min(np.abs(psi)) >= floor:
            return psi


def reconstruction(cfg: ExperimentConfig) -> ScenarioResult:
    n_exact = cfg.trials or 1000
    out = ScenarioResult()
    states = qs.random_pair_states(_rng(cfg.seed, 0), n_exact)
    fid_exact = np.empty(n_exact)
    worst_consistency = 0.0
    for i, psi in enumerate(states):
        rec = ms.reconstruct(*[ms.outcome_probabilities(psi, s) for s in ms.RECONSTRUCTION_SETTINGS])
        fid_exact[i] = qs.overlap(psi, rec.state)
        worst_consistency = max(worst_consistency, max(abs(v) for v in rec.consistency.values()))
        out.records.append({"trial": i, "mode": "exact", "fidelity": float(fid_exact[i])})
        out.table.append({"trial": i, "mode": "exact", "fidelity": float(fid_exact[i])})

    n_s = cfg.sampled_trials
    rng = _rng(cfg.seed, 1)
    fid_sampled = np.empty(n_s)
    for i in range(n_s):
        psi = _moduli_bounded_state(rng, 0.05)
        quads = ms.sampled_quads(psi, cfg.samples_per_setting, seed=cfg.seed * 1_000_003 + i)
        rec = ms.reconstruct(*[quads[s] for s in ms.RECONSTRUCTION_SETTINGS])
        fid_sampled[i] = qs.overlap(psi, rec.state)
        cond = max(rec.condition.values())
        out.records.append({"trial": i, "mode": "sampled", "fidelity": float(fid_sampled[i]),
                            "max_condition": float(cond)})
        out.table.append({"trial": i, "mode": "sampled", "fidelity": float(fid_sampled[i])})

    frac = float(np.mean(fid_sampled >= 0.995))
    out.summary = {"exact_min_fidelity": float(fid_exact.min()),
                   "exact_max_consistency_residual": worst_consistency,
                   "sampled_min_fidelity": float(fid_sampled.min()),
                   "sampled_median_fidelity": float(np.median(fid_sampled)),
                   "sampled_fraction_above_0.995": frac,
                   "samples_per_setting": cfg.samples_per_setting}
    out.checks = [
        Check("exact_min_fidelity", float(fid_exact.min()), 1 - 1e-12, ">="),
        Check("exact_consistency_residual", worst_consistency, 1e-9, "<="),
        Check("sampled_fraction_fidelity_ge_0.995", frac, 0.95, ">="),
    ]
    return out


def coupling_grid(seed: int, n: int = 10) -> list:
    """``n`` coupling parameter sets with mixed signs and magnitudes."""
    rng = _rng(seed, 7)
    j = rng.uniform(-2.0, 2.0, size=(n, 2))
    dt = rng.uniform(0.0, 3.0, size=n)
    return [mx.CouplingParams(float(a), float(b), float(c)) for (a, b), c in zip(j, dt)]


def mixing_closed_form(cfg: ExperimentConfig, grid: int = 10) -> ScenarioResult:
    rs = np.linspace(0.0, 1.0, grid)
    dis = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    r1, r2, di = (a.ravel() for a in np.meshgrid(rs, rs, dis, indexing="ij"))
    sources_ = src.source_state(np.column_stack([r1, np.zeros_like(r1), r2, di]))
    out = ScenarioResult()
    worst = 0.0
    for k, p in enumerate(coupling_grid(cfg.seed, grid)):
        full = ms.outcome_probabilities(mx.mix(sources_, p), "zz")
        closed = np.array([mx.closed_form_probs(a, b, d, p) for a, b, d in zip(r1, r2, di)])
        dev = np.max(np.abs(full[:, [0, 1, 3]] - closed))
        worst = max(worst, float(dev))
        rec = {"set": k, "j_z": p.j_z, "j_xy": p.j_xy, "dt": p.dt, "v": mx.mixing_parameter_v(p),
               "max_deviation": float(dev)}
        out.records.append(rec)
        out.table.append(rec)
    out.summary = {"max_deviation": worst, "grid_points": len(r1) * grid}
    out.checks = [Check("closed_form_max_deviation", worst, 1e-12, "<")]
    return out


def ising_invariance(cfg: ExperimentConfig) -> ScenarioResult:
    n_sources = cfg.trials or 20
    j = cfg.j_z if cfg.j_z != 0 else 1.0
    times = np.linspace(0.0, 3 * np.pi / abs(j), cfg.time_points)
    sources_ = src.bounded_source_sampler()(_rng(cfg.seed, 0), n_sources)
    out = ScenarioResult()
    max_gap, min_tangle = 0.0, np.inf
    for t in times:
        p = mx.CouplingParams(j, 0.0, float(t))
        mixed = mx.mix(sources_, p)
        gaps = np.abs(ms.product_gap(ms.outcome_probabilities(mixed, "zz")))
        tang = qs.tangle(mixed)
        phase = abs(j) * t
        away = min(phase % np.pi, np.pi - phase % np.pi) >= 0.1
        max_gap = max(max_gap, float(gaps.max()))
        if away:
            min_tangle = min(min_tangle, float(tang.min()))
        for i in range(n_sources):
            out.table.append({"source": i, "dt": float(t), "product_gap": float(gaps[i]),
                              "tangle": float(tang[i]), "nontrivial_time": bool(away)})
        out.records.append({"dt": float(t), "max_product_gap": float(gaps.max()),
                            "min_tangle": float(tang.min()), "nontrivial_time": bool(away)})
    out.summary = {"max_product_gap": max_gap, "min_tangle_nontrivial": min_tangle, "j_z": j}
    out.checks = [
        Check("zz_product_gap", max_gap, 1e-12, "<"),
        Check("min_tangle_away_from_k_pi", min_tangle, 1e-3, ">"),
    ]
    return out


def adaptation(cfg: ExperimentConfig) -> ScenarioResult:
    p = cfg.coupling()
    config = cfg.adapt_config()
    report = sp.adapt(lambda s: mx.mix(s, p), src.bounded_source_sampler(), config,
                      seed=cfg.seed, reference=p)
    dist = cfg.distribution()
    held_out = src.source_state(src.sample_sources(dist, dist, cfg.trials or 100, cfg.seed + 1))
    held_tangle = qs.tangle(sp.unmix(mx.mix(held_out, p), report.gamma))
    out = ScenarioResult()
    for r in report.restarts:
        out.records.append({"restart": r.index, "cost": r.cost, "iterations": r.iterations,
                            "gamma": [float(g) for g in r.gamma],
                            "delta_residuals": list(sp.delta_residuals(r.gamma, p))})
        out.table.extend({"restart": r.index, "iteration": k, "cost": c} for k, c in enumerate(r.history))
    res = report.delta_residuals
    out.summary = {"final_cost": report.final_cost, "converged": report.converged,
                   "best_restart": report.best_restart, "gamma": [float(g) for g in report.gamma],
                   "delta_residuals": list(res), "under_constrained": report.under_constrained,
                   "held_out_max_tangle": float(held_tangle.max()), "iterations": report.iterations}
    out.checks = [
        Check("best_restart_cost", report.final_cost, config.effective_target, "<="),
        Check("residual_delta3_minus_delta2_mod_pi", res[0], 1e-5, "<"),
        Check("residual_delta1_plus_delta4_minus_2delta2_mod_2pi", res[1], 1e-5, "<"),
        Check("held_out_max_tangle", float(held_tangle.max()), 1e-8, "<"),
    ]
    return out


def random_observable(rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    return (a + a.conj().T) / 2


def ensemble_density_check(cfg: ExperimentConfig) -> ScenarioResult:
    n_ens = cfg.trials or 100
    out = ScenarioResult()
    worst, worst_eig, worst_trace = 0.0, np.inf, 0.0
    for k in range(n_ens):
        rng = _rng(cfg.seed, k)
        f = qs.random_single_states(rng, 1000)
        o = random_observable(rng)
        rho = src.ensemble_density(f)
        direct = float(np.mean(np.real(np.einsum("nk,kl,nl->n", f.conj(), o, f))))
        via_rho = float(np.real(np.trace(rho @ o)))
        worst = max(worst, abs(direct - via_rho))
        worst_eig = min(worst_eig, float(np.linalg.eigvalsh(rho).min()))
        worst_trace = max(worst_trace, abs(float(np.real(np.trace(rho))) - 1.0))
        out.records.append({"ensemble": k, "direct": direct, "trace_rho_o": via_rho})
        out.table.append({"ensemble": k, "difference": direct - via_rho})
    out.summary = {"max_difference": worst, "min_eigenvalue": worst_eig, "max_trace_deviation": worst_trace}
    out.checks = [
        Check("two_path_max_difference", worst, 1e-12, "<="),
        Check("min_eigenvalue", worst_eig, -1e-12, ">="),
        Check("trace_deviation", worst_trace, 1e-12, "<="),
    ]
    return out


SCENARIOS: dict[str, Callable[[ExperimentConfig], ScenarioResult]] = {
    "criterion-equivalence": criterion_equivalence,
    "counterexample": counterexample,
    "reconstruction": reconstruction,
    "mixing-closed-form": mixing_closed_form,
    "ising-invariance": ising_invariance,
    "adaptation": adaptation,
    "ensemble-density": ensemble_density_check,
}
