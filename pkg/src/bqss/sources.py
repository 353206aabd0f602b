"""Random quantum sources: spins prepared along randomly oriented fields.

A field direction ``(theta_E, phi_E)`` prepares the spin in ``|+Z>``, which in
the laboratory basis reads ``r|+> + sqrt(1 - r^2) e^{i phi}|->`` with
``r = cos(theta_E / 2)`` and ``phi = phi_E``. Random directions therefore
make ``(r, phi)`` ordinary random variables, independent across spins when
the two fields are drawn independently.

Default laws are uniform on the sphere for the direction (``theta`` with
density ``sin(theta)/2``, ``phi`` uniform); they are a choice of this
package, not a property of the model, and are echoed in run reports.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .qstate import as_single_state, product

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class Law:
    """One-dimensional law: ``sphere`` (theta only), ``uniform``, ``range`` or ``point``."""

    kind: str = "uniform"
    low: float = 0.0
    high: float = 0.0
    value: float = 0.0

    def sample(self, rng: np.random.Generator, n: int, upper: float) -> np.ndarray:
        u = rng.random(n)
        if self.kind == "sphere":
            return np.arccos(1.0 - 2.0 * u)
        if self.kind == "uniform":
            return upper * u
        if self.kind == "range":
            return self.low + (self.high - self.low) * u
        if self.kind == "point":
            return np.full(n, float(self.value))
        raise ValueError(f"unknown law {self.kind!r}")

    def check_support(self, upper: float) -> None:
        if self.kind == "point":
            ok = 0.0 <= self.value <= upper
        elif self.kind == "range":
            ok = 0.0 <= self.low <= self.high <= upper
        else:
            ok = self.kind in ("sphere", "uniform")
        if not ok:
            raise ValueError(f"{self} is not a valid law on [0, {upper:.6g}]")


def law_from_spec(spec: str) -> Law:
    """Parse ``"sphere"``, ``"uniform"``, ``"point:0.3"`` or ``"range:0.1:0.5"``."""
    kind, *args = spec.split(":")
    vals = [float(a) for a in args]
    if kind == "point" and len(vals) == 1:
        return Law("point", value=vals[0])
    if kind == "range" and len(vals) == 2:
        return Law("range", low=vals[0], high=vals[1])
    if kind in ("sphere", "uniform") and not vals:
        return Law(kind)
    raise ValueError(f"bad law spec {spec!r}")


@dataclass(frozen=True)
class DirectionDistribution:
    theta_law: Law = Law("sphere")
    phi_law: Law = Law("uniform")
    independent: bool = True
    # (rng, n) -> (theta, phi); required when theta and phi are dependent
    joint: Optional[Callable[[np.random.Generator, int], tuple]] = None

    def __post_init__(self):
        if self.theta_law.kind != "sphere":
            self.theta_law.check_support(np.pi)
        if self.phi_law.kind == "sphere":
            raise ValueError("the sphere law applies to theta only")
        self.phi_law.check_support(TWO_PI)
        if not self.independent and self.joint is None:
            raise ValueError("a dependent distribution needs a joint sampler")

    def sample(self, rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        if not self.independent:
            theta, phi = self.joint(rng, n)
            theta, phi = np.asarray(theta, dtype=float), np.asarray(phi, dtype=float)
            if np.any((theta < 0) | (theta > np.pi)):
                raise ValueError("joint sampler produced theta outside [0, pi]")
            return theta, np.mod(phi, TWO_PI)
        theta = self.theta_law.sample(rng, n, np.pi)
        phi = self.phi_law.sample(rng, n, TWO_PI)
        return theta, np.mod(phi, TWO_PI)

    def describe(self) -> dict:
        return {"theta_law": self.theta_law.__dict__, "phi_law": self.phi_law.__dict__,
                "independent": self.independent}


@dataclass(frozen=True)
class SourcePair:
    r1: float
    phi1: float
    r2: float
    phi2: float

    def __post_init__(self):
        for r in (self.r1, self.r2):
            if not 0.0 <= r <= 1.0:
                raise ValueError(f"r must lie in [0, 1], got {r}")
        for phi in (self.phi1, self.phi2):
            if not 0.0 <= phi < TWO_PI:
                raise ValueError(f"phi must lie in [0, 2 pi), got {phi}")

    def as_array(self) -> np.ndarray:
        return np.array([self.r1, self.phi1, self.r2, self.phi2])


def _source_rngs(seed: int) -> list:
    children = np.random.SeedSequence(seed).spawn(2)
    return [np.random.Generator(np.random.Philox(c)) for c in children]


def sample_sources(d1: DirectionDistribution, d2: DirectionDistribution, n: int, seed: int,
                   fix_phi1: bool = False, share_theta: bool = False) -> np.ndarray:
    """``n`` draws of ``(r1, phi1, r2, phi2)`` as an ``(n, 4)`` array.

    Each spin has its own child stream, so the two are independent unless
    ``share_theta`` deliberately reuses spin 1's polar angle for spin 2.
    ``fix_phi1`` applies the classical-processing gauge ``phi1 = 0``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng1, rng2 = _source_rngs(seed)
    theta1, phi1 = d1.sample(rng1, n)
    theta2, phi2 = d2.sample(rng2, n)
    if share_theta:
        theta2 = theta1
    if fix_phi1:
        phi1 = np.zeros(n)
    r1 = np.clip(np.cos(theta1 / 2), 0.0, 1.0)
    r2 = np.clip(np.cos(theta2 / 2), 0.0, 1.0)
    return np.column_stack([r1, phi1, r2, phi2])


def sample_source(d1: DirectionDistribution, d2: DirectionDistribution, seed: int,
                  fix_phi1: bool = False) -> SourcePair:
    return SourcePair(*map(float, sample_sources(d1, d2, 1, seed, fix_phi1)[0]))


def _single(r, phi) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return np.stack([r + 0j, np.sqrt(1.0 - r * r) * np.exp(1j * np.asarray(phi))], axis=-1)


def source_state(s) -> np.ndarray:
    """Product pair state for a :class:`SourcePair` or an ``(n, 4)`` array of them."""
    a = s.as_array() if isinstance(s, SourcePair) else np.asarray(s, dtype=float)
    return product(_single(a[..., 0], a[..., 1]), _single(a[..., 2], a[..., 3]))


def bounded_source_sampler(r_min: float = 0.2, r_max: float = 0.98) -> Callable:
    """Sampler of product states with ``r`` uniform in ``[r_min, r_max]``.

    Keeping every modulus away from 0 makes ``c2 c3 != 0`` for each state, so
    a training batch constrains both disentanglement conditions.
    """
    if not 0.0 <= r_min <= r_max <= 1.0:
        raise ValueError("need 0 <= r_min <= r_max <= 1")

    def sampler(rng: np.random.Generator, n: int) -> np.ndarray:
        r = rng.uniform(r_min, r_max, size=(n, 2))
        phi = rng.uniform(0.0, TWO_PI, size=(n, 2))
        return source_state(np.column_stack([r[:, 0], phi[:, 0], r[:, 1], phi[:, 1]]))

    return sampler


VARIABLES = ("r1", "phi1", "r2", "phi2")


@dataclass
class IndependenceStats:
    n: int
    correlation: np.ndarray  # 4x4, NaN where undefined
    stderr: float  # standard error of a correlation under independence
    zero_variance: tuple

    def pair(self, a: str, b: str) -> float:
        return float(self.correlation[VARIABLES.index(a), VARIABLES.index(b)])

    def cross_pairs(self) -> dict:
        return {(a, b): self.pair(a, b) for a in ("r1", "phi1") for b in ("r2", "phi2")}


def independence_stats(samples, min_samples: int = 100) -> IndependenceStats:
    """Pairwise sample correlations among ``r1, phi1, r2, phi2``.

    Columns with zero variance are flagged and their correlations set to NaN.
    """
    if isinstance(samples, np.ndarray):
        x = np.asarray(samples, dtype=float)
    else:
        x = np.array([s.as_array() if isinstance(s, SourcePair) else s for s in samples], dtype=float)
    if x.ndim != 2 or x.shape[1] != 4:
        raise ValueError("samples must be (n, 4)")
    n = x.shape[0]
    if n < min_samples:
        raise ValueError(f"need at least {min_samples} samples, got {n}")
    centred = x - x.mean(axis=0)
    sd = np.sqrt(np.mean(centred ** 2, axis=0))
    zero = sd <= 1e-15 * np.maximum(1.0, np.abs(x).max(axis=0))
    safe = np.where(zero, 1.0, sd)
    corr = (centred.T @ centred) / n / np.outer(safe, safe)
    corr[zero, :] = np.nan
    corr[:, zero] = np.nan
    return IndependenceStats(n, corr, 1.0 / np.sqrt(n), tuple(VARIABLES[i] for i in np.flatnonzero(zero)))


def ensemble_density(samples: Sequence) -> np.ndarray:
    """Density operator of a random pure-state ensemble, ``rho[l, k] = mean(f_l f_k^*)``."""
    f = as_single_state(np.asarray(samples, dtype=complex))
    if f.ndim != 2 or f.shape[0] == 0:
        raise ValueError("need a non-empty (n, 2) array of single-qubit states")
    return np.einsum("nl,nk->lk", f, np.conj(f)) / f.shape[0]
