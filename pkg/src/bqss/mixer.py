"""Heisenberg-cylindrical coupling between the two spins, seen as a mixer.

The coupling Hamiltonian (hbar = 1) is::

    H = -2 J_z s1z s2z - J_xy (s1+ s2- + s1- s2+)

It is diagonal in ``(|++>, T, S, |-->)`` with ``T, S = (|+-> +/- |-+>)/sqrt(2)``;
the matrix ``Q`` maps that basis to the standard one and is its own inverse.
Evolution over ``dt`` is ``M = Q D Q`` with ``D = diag(exp(-i omega_k dt))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qstate import as_pair_state

SQRT_HALF = np.sqrt(0.5)


@dataclass(frozen=True)
class CouplingParams:
    j_z: float
    j_xy: float
    dt: float

    def __post_init__(self):
        if not all(np.isfinite([self.j_z, self.j_xy, self.dt])):
            raise ValueError("coupling parameters must be finite")
        if self.dt < 0:
            raise ValueError("dt must be non-negative")


def q_matrix() -> np.ndarray:
    q = np.zeros((4, 4))
    q[0, 0] = q[3, 3] = 1.0
    q[1, 1] = q[1, 2] = q[2, 1] = SQRT_HALF
    q[2, 2] = -SQRT_HALF
    return q


def spin_operators() -> dict:
    """Two-spin operators ``s1z s2z`` and the flip-flop term on the standard basis."""
    sz = np.diag([0.5, -0.5]).astype(complex)
    sp = np.array([[0, 1], [0, 0]], dtype=complex)
    sm = sp.T.copy()
    return {
        "s1z_s2z": np.kron(sz, sz),
        "flip_flop": np.kron(sp, sm) + np.kron(sm, sp),
    }


def hamiltonian(p: CouplingParams) -> np.ndarray:
    ops = spin_operators()
    return -2.0 * p.j_z * ops["s1z_s2z"] - p.j_xy * ops["flip_flop"]


def omega_frequencies(p: CouplingParams) -> np.ndarray:
    """Eigenfrequencies of ``H`` on ``(|++>, T, S, |-->)``; ``omega_1 == omega_4``."""
    half = 0.5 * p.j_z
    return np.array([-half, half - p.j_xy, half + p.j_xy, -half])


def mixing_matrix(p: CouplingParams) -> np.ndarray:
    q = q_matrix()
    d = np.exp(-1j * omega_frequencies(p) * p.dt)
    return q @ np.diag(d) @ q


def mix(psi0, p: CouplingParams) -> np.ndarray:
    """Evolve a pair state (or a stack of them) through the coupling."""
    psi0 = as_pair_state(psi0)
    return psi0 @ mixing_matrix(p).T


def mixing_parameter_v(p: CouplingParams) -> float:
    """``v = sgn(cos D) sin D`` with ``D = -J_xy dt``; ``sgn(0)`` is taken as +1."""
    delta_e = -p.j_xy * p.dt
    sign = 1.0 if np.cos(delta_e) >= 0 else -1.0
    return float(sign * np.sin(delta_e))


def closed_form_probs(r1: float, r2: float, delta_i: float,
                      p: CouplingParams) -> tuple[float, float, float]:
    """``(p1, p2, p4)`` of the ``zz`` measurement after mixing a product source.

    The source is ``r1|+> + sqrt(1-r1^2)|->`` times
    ``r2|+> + sqrt(1-r2^2) e^{i delta_i}|->`` (qubit 1 phase fixed to 0).
    ``p1`` and ``p4`` are unchanged by the coupling; ``p3`` is the remainder.
    """
    if not (0.0 <= r1 <= 1.0 and 0.0 <= r2 <= 1.0):
        raise ValueError("r1 and r2 must lie in [0, 1]")
    if not np.isfinite(delta_i):
        raise ValueError("delta_i must be finite")
    v = mixing_parameter_v(p)
    a1, a2 = r1 * r1, r2 * r2
    p1 = a1 * a2
    p4 = (1 - a1) * (1 - a2)
    p2 = (a1 * (1 - a2) * (1 - v * v) + (1 - a1) * a2 * v * v
          - 2 * r1 * r2 * np.sqrt(1 - a1) * np.sqrt(1 - a2) * np.sqrt(1 - v * v) * v * np.sin(delta_i))
    return float(p1), float(p2), float(p4)
