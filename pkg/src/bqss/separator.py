"""Separating system: the tunable inverting block and its blind adaptation.

The inverting block applies ``U = Q diag(e^{i gamma}) Q`` to the mixer output.
Composed with the mixer it acts as ``Q diag(e^{i delta}) Q`` where
``delta_k = gamma_k - omega_k dt``. Every product source stays unentangled
exactly when::

    delta_3 - delta_2 = m pi             (m integer)
    delta_1 + delta_4 = 2 delta_2 + 2 k pi  (k integer)

The second condition is only probed by sources with ``c2 c3 != 0``.
Adaptation only ever sees the mixer through ``mix_oracle`` and never reads
the coupling; ``reference`` parameters, when given, are used solely to
report the residuals of the two conditions afterwards.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize

from . import _accel
from .measurement import make_rng, outcome_probabilities, product_gap
from .mixer import CouplingParams, omega_frequencies, q_matrix
from .qstate import as_pair_state, tangle
from .sources import bounded_source_sampler

log = logging.getLogger(__name__)

COST_KINDS = ("amplitude", "probability", "probability-sampled")
_PROBABILITY_SETTINGS = ("zz", "zx", "zy")


def unmixing_matrix(gamma) -> np.ndarray:
    q = q_matrix()
    return q @ np.diag(np.exp(1j * np.asarray(gamma, dtype=float))) @ q


def unmix(psi, gamma) -> np.ndarray:
    """Apply the inverting block to a pair state or a stack of them."""
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (4,) or not np.all(np.isfinite(gamma)):
        raise ValueError("gamma must be 4 finite reals")
    return as_pair_state(psi) @ unmixing_matrix(gamma).T


def _fold(x: float, period: float) -> float:
    r = float(np.mod(x, period))
    return min(r, period - r)


def deltas(gamma, p: CouplingParams) -> np.ndarray:
    return np.asarray(gamma, dtype=float) - omega_frequencies(p) * p.dt


def delta_residuals(gamma, p: CouplingParams) -> tuple[float, float]:
    """Distances of ``delta_3 - delta_2`` to ``pi Z`` and ``delta_1 + delta_4 - 2 delta_2`` to ``2 pi Z``.

    Non-blind diagnostic: needs the true coupling.
    """
    d = deltas(gamma, p)
    return _fold(d[2] - d[1], np.pi), _fold(d[0] + d[3] - 2 * d[1], 2 * np.pi)


def gamma_for_deltas(delta, p: CouplingParams) -> np.ndarray:
    return np.asarray(delta, dtype=float) + omega_frequencies(p) * p.dt


def cost_amplitude(batch) -> float:
    """Mean squared tangle over a batch of inverting-block outputs."""
    batch = np.atleast_2d(as_pair_state(batch))
    if batch.shape[0] == 0:
        raise ValueError("empty batch")
    t = tangle(batch)
    return float(np.mean(t * t))


def cost_probability(batch, n: Optional[int] = None, seed: int = 0) -> float:
    """Mean of ``(P1 P4 - P2 P3)^2`` over the batch and the ``zz, zx, zy`` settings.

    ``n=None`` uses exact probabilities; otherwise each (state, setting) is
    estimated from ``n`` shots on its own stream of ``seed``.
    """
    batch = np.atleast_2d(as_pair_state(batch))
    if batch.shape[0] == 0:
        raise ValueError("empty batch")
    if n is None:
        gaps = np.stack([product_gap(outcome_probabilities(batch, s)) for s in _PROBABILITY_SETTINGS])
        return float(np.mean(gaps ** 2))
    if n < 1:
        raise ValueError("n must be at least 1")
    total = 0.0
    for b, psi in enumerate(batch):
        for j, s in enumerate(_PROBABILITY_SETTINGS):
            cdf = np.cumsum(outcome_probabilities(psi, s))
            q = _accel.count_outcomes(make_rng(seed, 3 * b + j), cdf, n) / n
            total += float(product_gap(q)) ** 2
    return total / (3 * batch.shape[0])


@dataclass
class AdaptConfig:
    restarts: int = 8
    batch_size: int = 32
    max_iterations: int = 20000
    target: Optional[float] = None  # default: 1e-10 for exact costs, 1e-4 when sampled
    cost: str = "amplitude"
    samples_per_setting: int = 10_000
    simplex_step: float = 0.6
    xatol: float = 1e-13
    fatol: float = 1e-30
    initial_gamma: Optional[tuple] = None  # start near this point instead of at random
    initial_noise: float = 0.05
    probe_step: float = 0.5

    def __post_init__(self):
        if self.cost not in COST_KINDS:
            raise ValueError(f"cost must be one of {COST_KINDS}")
        if self.restarts < 1 or self.batch_size < 1 or self.max_iterations < 1:
            raise ValueError("restarts, batch_size and max_iterations must be positive")
        if self.samples_per_setting < 1:
            raise ValueError("samples_per_setting must be positive")

    @property
    def effective_target(self) -> float:
        if self.target is not None:
            return self.target
        return 1e-4 if self.cost == "probability-sampled" else 1e-10


@dataclass
class RestartResult:
    index: int
    gamma: np.ndarray
    cost: float
    iterations: int
    history: list = field(default_factory=list)


@dataclass
class AdaptationReport:
    final_cost: float
    iterations: int
    gamma: np.ndarray
    converged: bool
    under_constrained: bool
    delta_residuals: Optional[tuple] = None
    restarts: list = field(default_factory=list)
    best_restart: int = 0


def make_cost(mixed: np.ndarray, config: AdaptConfig, seed: int) -> Callable[[np.ndarray], float]:
    """Cost of a candidate ``gamma`` on fixed mixer outputs."""
    if config.cost == "amplitude":
        return lambda g: _accel.unmix_cost(mixed, g)
    if config.cost == "probability":
        return lambda g: cost_probability(unmix(mixed, g))
    cost_seed = int(np.random.SeedSequence(seed).generate_state(1)[0])
    # common random numbers: the same shots for every gamma keep the cost deterministic
    return lambda g: cost_probability(unmix(mixed, g), config.samples_per_setting, cost_seed)


def _run_restart(cost, x0, config: AdaptConfig, index: int) -> RestartResult:
    history = []

    def record(intermediate_result):
        history.append(float(intermediate_result.fun))

    simplex = np.vstack([x0, x0 + config.simplex_step * np.eye(4)])
    res = minimize(cost, x0, method="Nelder-Mead", callback=record,
                   options={"initial_simplex": simplex, "maxiter": config.max_iterations,
                            "maxfev": 4 * config.max_iterations,
                            "xatol": config.xatol, "fatol": config.fatol})
    return RestartResult(index, np.mod(res.x, 2 * np.pi), float(res.fun), int(res.nit), history)


def adapt(mix_oracle: Callable[[np.ndarray], np.ndarray],
          source_sampler: Optional[Callable[[np.random.Generator, int], np.ndarray]] = None,
          config: Optional[AdaptConfig] = None, seed: int = 0,
          reference: Optional[CouplingParams] = None) -> AdaptationReport:
    """Tune the four phases of the inverting block until outputs are unentangled.

    ``source_sampler(rng, n)`` plays the Writer and returns ``n`` product
    states; they are passed through ``mix_oracle`` once and the optimiser
    works on those outputs only. Each restart runs a Nelder-Mead simplex from
    a random (or near ``config.initial_gamma``) start; the best restart wins.

    Solutions form a family (the two conditions leave two phases free), so
    success is judged by the cost and, non-blindly, by the residuals.
    ``under_constrained`` is set when moving ``gamma_1`` by ``probe_step``
    leaves the cost at its minimum, i.e. the training data never tested
    ``delta_1 + delta_4 = 2 delta_2``.
    """
    config = config or AdaptConfig()
    source_sampler = source_sampler or bounded_source_sampler()
    ss_sources, ss_init, ss_cost = np.random.SeedSequence(seed).spawn(3)

    sources = as_pair_state(source_sampler(np.random.Generator(np.random.Philox(ss_sources)),
                                           config.batch_size))
    mixed = np.ascontiguousarray(as_pair_state(mix_oracle(sources)), dtype=np.complex128)
    cost = make_cost(mixed, config, int(ss_cost.generate_state(1)[0]))

    init_rng = np.random.Generator(np.random.Philox(ss_init))
    results = []
    for i in range(config.restarts):
        if config.initial_gamma is not None:
            x0 = np.asarray(config.initial_gamma, dtype=float) + init_rng.normal(0.0, config.initial_noise, 4)
        else:
            x0 = init_rng.uniform(0.0, 2 * np.pi, 4)
        results.append(_run_restart(cost, x0, config, i))
        log.debug("restart %d: cost %.3e after %d iterations", i, results[-1].cost, results[-1].iterations)

    best = min(results, key=lambda r: r.cost)
    target = config.effective_target
    probe = best.gamma + np.array([config.probe_step, 0.0, 0.0, 0.0])
    under = cost(probe) <= max(100.0 * best.cost, target)
    return AdaptationReport(
        final_cost=best.cost,
        iterations=sum(r.iterations for r in results),
        gamma=best.gamma,
        converged=best.cost <= target,
        under_constrained=bool(under),
        delta_residuals=delta_residuals(best.gamma, reference) if reference is not None else None,
        restarts=results,
        best_restart=best.index,
    )
