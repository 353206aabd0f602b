"""Pure-Python/numpy implementations of the hot kernels.

Semantics are identical to the compiled ``_kernels`` extension, including the
order in which uniforms are consumed from the generator, so both backends
produce the same counts for the same seed.
"""

import numpy as np

_CHUNK = 1 << 20
_SQRT_HALF = np.sqrt(0.5)


def count_outcomes(rng: np.random.Generator, cdf: np.ndarray, n: int) -> np.ndarray:
    """Draw ``n`` outcomes by inverse CDF and return the 4 counts.

    Outcome ``k`` is the first index with ``u < cdf[k]``; uniforms beyond
    ``cdf[2]`` fall into the last outcome so rounding in ``cdf[3]`` is harmless.
    """
    counts = np.zeros(4, dtype=np.int64)
    edges = np.asarray(cdf[:3], dtype=float)
    left = n
    while left > 0:
        m = min(left, _CHUNK)
        u = rng.random(m)
        idx = np.searchsorted(edges, u, side="right")
        counts += np.bincount(idx, minlength=4)
        left -= m
    return counts


def unmixed_tangles(states: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """Tangle of ``Q diag(e^{i gamma}) Q`` applied to each row of ``states``."""
    c = np.asarray(states, dtype=complex)
    ph = np.exp(1j * np.asarray(gamma, dtype=float))
    a1 = ph[0] * c[:, 0]
    a2 = ph[1] * (c[:, 1] + c[:, 2]) * _SQRT_HALF
    a3 = ph[2] * (c[:, 1] - c[:, 2]) * _SQRT_HALF
    a4 = ph[3] * c[:, 3]
    # second Q: out2 * out3 = (a2^2 - a3^2) / 2
    return np.abs(a1 * a4 - 0.5 * (a2 * a2 - a3 * a3))


def unmix_cost(states: np.ndarray, gamma: np.ndarray) -> float:
    """Mean squared tangle of the unmixed batch."""
    t = unmixed_tangles(states, gamma)
    return float(np.mean(t * t))
