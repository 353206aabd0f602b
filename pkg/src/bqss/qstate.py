"""Pure-state algebra for one and two qubits.

States are plain complex numpy arrays. A single-qubit state is a length-2
vector of amplitudes on ``(|+>, |->)``; a pair state is a length-4 vector on
the standard basis ``(|++>, |+->, |-+>, |-->)`` where the first label refers
to qubit 1. Functions that are cheap to vectorise accept stacks of states
with shape ``(..., 4)``.

Eigenbasis convention for a direction ``u = (theta, phi)``::

    |+u> = cos(theta/2) |+> + sin(theta/2) e^{i phi} |->
    |-u> = sin(theta/2) |+> - cos(theta/2) e^{i phi} |->

The named axes ``"x"``, ``"y"`` and ``"z"`` use the textbook bases, which agree
with the formula for x and y; for z the formula would give ``-|->`` so the
named axis keeps ``|->`` and ``basis_change(psi, "z", "z")`` is the identity.
All entanglement tests use moduli of products, so the sign is immaterial.

Field directions map to states through ``r = cos(theta_E / 2)``,
``phi = phi_E``; a printed variant of this relation carries a stray ``2E``
subscript on theta, read here as the single-spin polar angle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

DEFAULT_TOL = 1e-10
NORM_TOL = 1e-12

KET_PLUS = np.array([1.0, 0.0], dtype=complex)
KET_MINUS = np.array([0.0, 1.0], dtype=complex)

# Psi_{i-i11}: entangled, yet passes the zz, xx and yy product equalities.
PSI_I_MI_1_1 = np.array([1j, -1j, 1.0, 1.0], dtype=complex) / 2
BELL_PHI_PLUS = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / np.sqrt(2)


class StateValidationError(ValueError):
    """Raised when an input is not a normalized state of the right shape."""


class NotAProductStateError(ValueError):
    """Raised by :func:`factorize` when the pair state is entangled."""


@dataclass(frozen=True)
class SpinDirection:
    """Unit vector given by polar angle ``theta`` and azimuth ``phi`` (radians)."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.theta <= np.pi):
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not np.isfinite(self.phi):
            raise ValueError("phi must be finite")
        object.__setattr__(self, "phi", float(self.phi) % (2 * np.pi))


Axis = Union[str, SpinDirection]

# unnormalized columns and the squared normalization; keeping 1/sqrt(2) out of
# the matrix makes probabilities of dyadic states exact
_NAMED_BASES = {
    "z": (np.array([[1, 0], [0, 1]], dtype=complex), 1.0),
    "x": (np.array([[1, 1], [1, -1]], dtype=complex), 0.5),
    "y": (np.array([[1, 1], [1j, -1j]], dtype=complex), 0.5),
}


def _basis_parts(axis: Axis) -> tuple[np.ndarray, float]:
    if isinstance(axis, SpinDirection):
        return eigenbasis(axis), 1.0
    try:
        return _NAMED_BASES[axis]
    except (KeyError, TypeError):
        raise ValueError(f"unknown axis {axis!r}; expected 'x', 'y', 'z' or a SpinDirection") from None


def eigenbasis(axis: Axis) -> np.ndarray:
    """2x2 unitary whose columns are ``|+u>`` and ``|-u>`` for ``axis``."""
    if isinstance(axis, SpinDirection):
        c = np.cos(axis.theta / 2)
        s = np.sin(axis.theta / 2)
        e = np.exp(1j * axis.phi)
        return np.array([[c, s], [s * e, -c * e]], dtype=complex)
    w, scale_sq = _basis_parts(axis)
    return w * np.sqrt(scale_sq)


def _check_normalized(psi: np.ndarray, size: int, tol: float = NORM_TOL) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape[-1:] != (size,):
        raise StateValidationError(f"expected trailing dimension {size}, got shape {psi.shape}")
    if not np.all(np.isfinite(psi)):
        raise StateValidationError("amplitudes must be finite")
    norms = np.sum(np.abs(psi) ** 2, axis=-1)
    if np.any(np.abs(norms - 1.0) > tol):
        worst = float(np.max(np.abs(norms - 1.0)))
        raise StateValidationError(f"state is not normalized (|norm^2 - 1| = {worst:.3e})")
    return psi


def as_single_state(s, tol: float = NORM_TOL) -> np.ndarray:
    """Validate and return a single-qubit state (or a stack of them)."""
    return _check_normalized(s, 2, tol)


def as_pair_state(psi, tol: float = NORM_TOL) -> np.ndarray:
    """Validate and return a pair state (or a stack of them)."""
    return _check_normalized(psi, 4, tol)


def normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def single_state(r: float, phi: float) -> np.ndarray:
    """``r|+> + sqrt(1 - r^2) e^{i phi} |->`` for ``r`` in [0, 1]."""
    if not (0.0 <= r <= 1.0):
        raise StateValidationError(f"r must lie in [0, 1], got {r}")
    return np.array([r, np.sqrt(1.0 - r * r) * np.exp(1j * phi)], dtype=complex)


def product(s1, s2) -> np.ndarray:
    """Tensor product of two single-qubit states, ``(ac, ad, bc, bd)``."""
    s1 = as_single_state(s1)
    s2 = as_single_state(s2)
    a, b = s1[..., 0], s1[..., 1]
    c, d = s2[..., 0], s2[..., 1]
    return np.stack([a * c, a * d, b * c, b * d], axis=-1)


def entanglement_residual(psi) -> np.ndarray:
    """Complex ``c1 c4 - c2 c3``; zero exactly for product states."""
    psi = np.asarray(psi, dtype=complex)
    return psi[..., 0] * psi[..., 3] - psi[..., 1] * psi[..., 2]


def tangle(psi):
    """``|c1 c4 - c2 c3|``, in [0, 1/2]; twice this is the concurrence.

    Accepts a single state or a stack ``(..., 4)``; returns a float or array.
    """
    psi = as_pair_state(psi)
    t = np.abs(entanglement_residual(psi))
    return float(t) if t.ndim == 0 else t


def is_unentangled(psi, tol: float = DEFAULT_TOL):
    if tol <= 0:
        raise ValueError("tol must be positive")
    t = tangle(psi)
    return bool(t <= tol) if np.ndim(t) == 0 else t <= tol


def reduced_density(psi) -> np.ndarray:
    """Reduced density matrix of qubit 1, tracing out qubit 2."""
    psi = as_pair_state(psi)
    m = psi.reshape(psi.shape[:-1] + (2, 2))
    return m @ np.conj(np.swapaxes(m, -1, -2))


def reduced_density_2(psi) -> np.ndarray:
    """Reduced density matrix of qubit 2, tracing out qubit 1."""
    psi = as_pair_state(psi)
    m = psi.reshape(psi.shape[:-1] + (2, 2))
    return np.swapaxes(m, -1, -2) @ np.conj(m)


def purity_partial_trace(psi):
    """``Tr rho_1^2`` from an explicit partial trace; 1 iff unentangled."""
    rho = reduced_density(psi)
    p = np.real(np.einsum("...ij,...ji->...", rho, rho))
    return float(p) if p.ndim == 0 else p


def schmidt_number(psi, tol: float = DEFAULT_TOL) -> int:
    """Number of eigenvalues of ``rho_1`` above ``tol`` (1 or 2)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    evals = np.linalg.eigvalsh(reduced_density(psi))
    n = np.sum(evals > tol, axis=-1)
    return int(n) if np.ndim(n) == 0 else n


def factorize(psi, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Split an unentangled pair state into ``(s1, s2)`` with ``s1 (x) s2 == psi``.

    Writing the amplitudes as the matrix ``[[c1, c2], [c3, c4]]``, a product
    state has rank one, so any non-zero entry ``c_k`` yields qubit 1 from its
    column and qubit 2 from its row. Four branches follow, one per pivot:

    * ``c1 != 0``: ``c1 (|+> + c3/c1 |->) (x) (|+> + c2/c1 |->)``
    * ``c1 = 0, c3 != 0`` (so ``c2 = 0``): ``|-> (x) (c3|+> + c4|->)``
    * ``c1 = 0, c2 != 0`` (so ``c3 = 0``): ``(c2|+> + c4|->) (x) |->``
    * ``c1 = c2 = c3 = 0``: ``|-> (x) |->`` carrying the phase of ``c4``

    The pivot is the amplitude of largest modulus, which is what "non-zero"
    means in floating point: the mismatch on the one reconstructed entry is
    bounded by ``tangle / |pivot| <= 2 * tangle``. Global phase is moved onto
    ``s1`` so the product reproduces ``psi`` itself.

    Raises
    ------
    NotAProductStateError
        If ``tangle(psi) > tol``.
    """
    psi = as_pair_state(psi)
    if psi.ndim != 1:
        raise StateValidationError("factorize takes a single pair state")
    t = tangle(psi)
    if t > tol:
        raise NotAProductStateError(f"state is entangled (tangle = {t:.3e} > tol = {tol:.1e})")
    c1, c2, c3, c4 = psi
    k = int(np.argmax(np.abs(psi)))
    if k == 0:
        col, row, pivot = (c1, c3), (c1, c2), c1
    elif k == 2:
        col, row, pivot = (c1, c3), (c3, c4), c3
    elif k == 1:
        col, row, pivot = (c2, c4), (c1, c2), c2
    else:
        col, row, pivot = (c2, c4), (c3, c4), c4
    if abs(pivot) == 0.0:
        raise StateValidationError("zero state")
    s1 = normalize(np.array(col))
    s2 = normalize(np.array(row))
    # the rank-one product equals psi times e^{i arg pivot}; undo that on s1
    phase = np.vdot(product(s1, s2), psi)
    s1 = s1 * (phase / abs(phase))
    return s1, s2


def plus_state_along(direction: SpinDirection) -> np.ndarray:
    """``|+u>``: spin-up eigenstate along ``direction``.

    Its probability of giving +1/2 along z is ``cos^2(theta/2)``.
    """
    return eigenbasis(direction)[:, 0].copy()


def minus_state_along(direction: SpinDirection) -> np.ndarray:
    return eigenbasis(direction)[:, 1].copy()


def basis_change(psi, u: Axis, v: Axis) -> np.ndarray:
    """Coefficients of ``psi`` on the eigenbasis of ``(s_1u, s_2v)``.

    Output order is ``(+u+v, +u-v, -u+v, -u-v)``. The tangle is invariant
    because the change of basis is a local unitary.
    """
    raw, scale_sq = _unscaled_basis_change(psi, u, v)
    return raw * np.sqrt(scale_sq)


def _unscaled_basis_change(psi, u: Axis, v: Axis) -> tuple[np.ndarray, float]:
    psi = as_pair_state(psi)
    wu, su = _basis_parts(u)
    wv, sv = _basis_parts(v)
    return psi @ np.conj(np.kron(wu, wv)), su * sv


def basis_probabilities(psi, u: Axis, v: Axis) -> np.ndarray:
    """``|c_uv|^2`` for each basis state, with the normalization applied last."""
    raw, scale_sq = _unscaled_basis_change(psi, u, v)
    return (raw.real ** 2 + raw.imag ** 2) * scale_sq


def overlap(a, b) -> float:
    """``|<a|b>|``: global-phase-insensitive state comparison."""
    return float(abs(np.vdot(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))))


def same_state(a, b, tol: float = DEFAULT_TOL) -> bool:
    return overlap(a, b) >= 1.0 - tol


# ---------------------------------------------------------------------------
# Random states and their parameterisations

def state_from_params(x) -> np.ndarray:
    """Generic pair state from 8 reals (real and imaginary parts, then normalised)."""
    x = np.asarray(x, dtype=float)
    return normalize(x[..., :4] + 1j * x[..., 4:8])


def product_from_params(x) -> np.ndarray:
    """Product state from ``(theta1, phi1, theta2, phi2)``."""
    x = np.asarray(x, dtype=float)
    t1, p1, t2, p2 = x[..., 0], x[..., 1], x[..., 2], x[..., 3]
    s1 = np.stack([np.cos(t1 / 2), np.sin(t1 / 2) * np.exp(1j * p1)], axis=-1)
    s2 = np.stack([np.cos(t2 / 2), np.sin(t2 / 2) * np.exp(1j * p2)], axis=-1)
    return product(s1, s2)


def random_pair_states(rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` Haar-random pair states, shape ``(n, 4)``."""
    return state_from_params(rng.standard_normal((n, 8)))


def random_single_states(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))
    return normalize(z)


def random_product_states(rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` products of independent Haar-random single-qubit states."""
    return product(random_single_states(rng, n), random_single_states(rng, n))


def projector_coordinates(psi) -> np.ndarray:
    """Real coordinates of ``|psi><psi|``; invariant under global phase."""
    psi = np.asarray(psi, dtype=complex)
    p = np.outer(psi, np.conj(psi))
    return np.concatenate([p.real.ravel(), p.imag.ravel()])


def parameter_rank(param_map: Callable[[np.ndarray], np.ndarray], x0, h: float = 1e-6,
                   rtol: float = 1e-6) -> int:
    """Local number of physical degrees of freedom of a state parameterisation.

    Central finite differences of the projector coordinates (which quotient
    out norm and global phase) followed by a singular-value rank count.
    """
    x0 = np.asarray(x0, dtype=float)
    cols = []
    for i in range(x0.size):
        dx = np.zeros_like(x0)
        dx[i] = h
        plus = projector_coordinates(normalize(param_map(x0 + dx)))
        minus = projector_coordinates(normalize(param_map(x0 - dx)))
        cols.append((plus - minus) / (2 * h))
    sv = np.linalg.svd(np.column_stack(cols), compute_uv=False)
    return int(np.sum(sv > rtol * sv[0]))
