"""Backend selection for the hot kernels.

The compiled extension is used when it was built; otherwise the numpy
fallback is imported. Both expose ``count_outcomes``, ``unmixed_tangles`` and
``unmix_cost`` with identical results.
"""

import numpy as np

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

BACKEND = "compiled" if _compiled is not None else "python"
_impl = BACKENDS[BACKEND]


def use_backend(name: str) -> None:
    """Switch the active kernel backend (``"compiled"`` or ``"python"``)."""
    global BACKEND, _impl
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}")
    BACKEND = name
    _impl = BACKENDS[name]


def count_outcomes(rng: np.random.Generator, cdf, n: int) -> np.ndarray:
    return _impl.count_outcomes(rng, np.ascontiguousarray(cdf, dtype=np.float64), int(n))


def unmixed_tangles(states, gamma) -> np.ndarray:
    return _impl.unmixed_tangles(np.ascontiguousarray(states, dtype=np.complex128),
                                 np.ascontiguousarray(gamma, dtype=np.float64))


def unmix_cost(states, gamma) -> float:
    return float(_impl.unmix_cost(np.ascontiguousarray(states, dtype=np.complex128),
                                  np.ascontiguousarray(gamma, dtype=np.float64)))
