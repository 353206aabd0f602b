"""Joint spin-component measurements on a qubit pair.

A *setting* names the measured component for each spin, e.g. ``"zx"`` means
``s_1z`` on qubit 1 and ``s_2x`` on qubit 2; tuples mixing named axes and
:class:`~bqss.qstate.SpinDirection` objects are accepted too. A probability
quad orders the outcomes ``(+,+), (+,-), (-,+), (-,-)``.

Pure states are recovered from five settings ``zz, zx, zy, xz, yz``: the
``zz`` quad gives the moduli and each of the others gives, through one
cosine/sine pair, a phase difference between two amplitudes.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import _accel
from .qstate import Axis, as_pair_state, basis_probabilities, normalize

Setting = Union[str, tuple[Axis, Axis]]

RECONSTRUCTION_SETTINGS = ("zz", "zx", "zy", "xz", "yz")
DEFAULT_RECONSTRUCTION_TOL = 1e-6


class DegenerateInputError(ValueError):
    """Probability data that no pure state can produce, or that fixes nothing."""


def parse_setting(setting: Setting) -> tuple[Axis, Axis]:
    if isinstance(setting, str):
        if len(setting) != 2 or any(ch not in "xyz" for ch in setting):
            raise ValueError(f"setting string must be two of 'x', 'y', 'z', got {setting!r}")
        return setting[0], setting[1]
    axis1, axis2 = setting
    return axis1, axis2


@dataclass(frozen=True)
class OutcomeCounts:
    n: np.ndarray
    total: int

    def __post_init__(self):
        n = np.asarray(self.n, dtype=np.int64)
        if n.shape != (4,) or np.any(n < 0):
            raise ValueError("counts must be 4 non-negative integers")
        if int(n.sum()) != self.total or self.total <= 0:
            raise ValueError("counts must sum to a positive total")
        object.__setattr__(self, "n", n)

    def probabilities(self) -> np.ndarray:
        return self.n / self.total


def outcome_probabilities(psi, setting: Setting) -> np.ndarray:
    """Exact probability quad of ``psi`` (or a stack of states) for ``setting``."""
    u, v = parse_setting(setting)
    return basis_probabilities(psi, u, v)


def exact_quads(psi, settings: Sequence[Setting] = RECONSTRUCTION_SETTINGS) -> dict:
    return {s if isinstance(s, str) else parse_setting(s): outcome_probabilities(psi, s)
            for s in settings}


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator for ``(seed, stream)``; streams are independent."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream,))))


def sample_outcomes(psi, setting: Setting, n: int, seed: int, stream: int = 0) -> OutcomeCounts:
    """Simulate ``n`` joint measurements of ``setting`` on copies of ``psi``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    p = outcome_probabilities(as_pair_state(psi), setting)
    if p.ndim != 1:
        raise ValueError("sample_outcomes takes a single pair state")
    counts = _accel.count_outcomes(make_rng(seed, stream), np.cumsum(p), n)
    return OutcomeCounts(counts, int(n))


def sampled_quads(psi, n: int, seed: int,
                  settings: Sequence[Setting] = RECONSTRUCTION_SETTINGS) -> dict:
    """Empirical quads, one independent stream per setting."""
    return {s: sample_outcomes(psi, s, n, seed, stream=i).probabilities()
            for i, s in enumerate(settings)}


def product_gap(quad) -> np.ndarray:
    """``P1 P4 - P2 P3`` (vectorised over leading axes)."""
    q = np.asarray(quad, dtype=float)
    return q[..., 0] * q[..., 3] - q[..., 1] * q[..., 2]


def probability_criterion(pzz, pzx, pzy, tol: float = 1e-10):
    """Unentanglement test from the ``zz``, ``zx`` and ``zy`` quads.

    True iff ``|P1 P4 - P2 P3| <= tol`` for all three settings. Unlike the
    same-component version this is equivalent to ``c1 c4 = c2 c3``.
    """
    gaps = np.stack([np.abs(product_gap(q)) for q in (pzz, pzx, pzy)])
    ok = np.all(gaps <= tol, axis=0)
    return bool(ok) if ok.ndim == 0 else ok


def same_component_criterion(pzz, pxx, pyy, tol: float = 1e-10):
    """Product equalities for ``zz``, ``xx`` and ``yy``.

    Necessary but *not* sufficient for unentanglement: ``PSI_I_MI_1_1`` passes
    all three while being maximally entangled. Kept to demonstrate that.
    """
    return probability_criterion(pzz, pxx, pyy, tol)


# (i, j, source setting, outcome index) -> psi_i - psi_j from cos/sin pairs
_EDGES = (
    (0, 2, "xz", "yz", 0),
    (0, 1, "zx", "zy", 0),
    (2, 3, "zx", "zy", 2),
    (1, 3, "xz", "yz", 1),
)


def _edge_terms(pzz, pcos, psin, i, j, k):
    # 2P = rho_i^2 + rho_j^2 + 2 rho_i rho_j cos(d), and -2 rho_i rho_j sin(d) for the y quad
    base = pzz[i] + pzz[j]
    return 2 * pcos[k] - base, -(2 * psin[k] - base)


def phase_differences(pzz, pzx, pzy, tol: float = 1e-12) -> tuple[float, float]:
    """``(psi1 - psi2, psi3 - psi4)`` in (-pi, pi] from three quads.

    Raises
    ------
    DegenerateInputError
        If any ``zz`` probability vanishes, leaving a difference undefined.
    """
    pzz, pzx, pzy = (np.asarray(q, dtype=float) for q in (pzz, pzx, pzy))
    if np.any(2 * np.sqrt(np.clip(pzz, 0, None)) < tol):
        raise DegenerateInputError("a zz probability is zero; phase difference undefined")
    out = []
    for i, j, k in ((0, 1, 0), (2, 3, 2)):
        cos_num, sin_num = _edge_terms(pzz, pzx, pzy, i, j, k)
        out.append(float(np.arctan2(sin_num, cos_num)))
    # arctan2 returns [-pi, pi]; fold -pi onto pi and -0.0 onto 0.0
    return tuple(np.pi if d == -np.pi else d + 0.0 for d in out)


@dataclass
class Reconstruction:
    state: np.ndarray
    degenerate: tuple[bool, bool, bool, bool]
    unresolved: tuple[bool, bool, bool, bool]
    condition: dict = field(default_factory=dict)
    consistency: dict = field(default_factory=dict)
    anchor: int = 2


def reconstruct(pzz, pzx, pzy, pxz, pyz,
                tol: float = DEFAULT_RECONSTRUCTION_TOL) -> Reconstruction:
    """Recover a pure pair state (up to global phase) from five quads.

    Moduli come from ``zz``. Phases are fixed with ``psi3 = 0`` and then
    propagated along the differences ``psi1 - psi3`` (``xz``/``yz``),
    ``psi1 - psi2`` and ``psi3 - psi4`` (``zx``/``zy``). When a modulus falls
    below ``tol`` the amplitude is flagged ``degenerate`` and the chain is
    rerouted through ``psi2 - psi4`` (also from ``xz``/``yz``); the gauge
    moves to ``psi1`` or further if ``rho3`` itself is degenerate. Amplitudes
    no chain reaches keep phase 0 and are flagged ``unresolved``.

    ``condition`` maps each edge ``(i, j)`` (0-based) to ``1 / (2 rho_i rho_j)``,
    the amplification of probability errors into that phase. ``consistency``
    holds ``(cos^2 + sin^2) - 1`` per used edge; it is 0 for exact quads.
    """
    quads = {"zz": pzz, "zx": pzx, "zy": pzy, "xz": pxz, "yz": pyz}
    quads = {k: np.asarray(v, dtype=float) for k, v in quads.items()}
    for name, q in quads.items():
        if q.shape != (4,):
            raise ValueError(f"{name} quad must have 4 entries")
    pzz = quads["zz"]
    rho = np.sqrt(np.clip(pzz, 0.0, None))
    degenerate = rho < tol
    if np.all(degenerate):
        raise DegenerateInputError("all moduli are below tolerance")

    condition, consistency, diffs = {}, {}, {}
    for i, j, cs, sn, k in _EDGES:
        denom = 2 * rho[i] * rho[j]
        cos_num, sin_num = _edge_terms(pzz, quads[cs], quads[sn], i, j, k)
        condition[(i, j)] = 1.0 / denom if denom > 0 else float("inf")
        if degenerate[i] or degenerate[j] or denom < tol:
            # a valid state has |numerator| <= denominator
            if max(abs(cos_num), abs(sin_num)) > denom + tol:
                raise DegenerateInputError(
                    f"inconsistent quads: phase numerator for amplitudes {i + 1},{j + 1} "
                    f"is {max(abs(cos_num), abs(sin_num)):.3e} with vanishing moduli")
            continue
        diffs[(i, j)] = float(np.arctan2(sin_num, cos_num))
        consistency[(i, j)] = float((cos_num ** 2 + sin_num ** 2) / denom ** 2 - 1.0)

    anchor = next(a for a in (2, 0, 1, 3) if not degenerate[a])
    phase = np.zeros(4)
    known = {anchor}
    queue = deque([anchor])
    while queue:
        a = queue.popleft()
        for (i, j), d in diffs.items():
            if i == a and j not in known:
                phase[j] = phase[i] - d
            elif j == a and i not in known:
                phase[i] = phase[j] + d
            else:
                continue
            b = j if i == a else i
            known.add(b)
            queue.append(b)

    unresolved = tuple(bool(not degenerate[m] and m not in known) for m in range(4))
    amps = np.where(degenerate, 0.0, rho) * np.exp(1j * phase)
    return Reconstruction(
        state=normalize(amps),
        degenerate=tuple(bool(x) for x in degenerate),
        unresolved=unresolved,
        condition=condition,
        consistency=consistency,
        anchor=anchor,
    )


def reconstruct_state(pzz, pzx, pzy, pxz, pyz, tol: float = DEFAULT_RECONSTRUCTION_TOL) -> np.ndarray:
    """State vector from :func:`reconstruct`, dropping the diagnostics."""
    return reconstruct(pzz, pzx, pzy, pxz, pyz, tol).state
