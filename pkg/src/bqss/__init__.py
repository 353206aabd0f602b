"""Blind quantum source separation on a qubit pair.

Modules: ``qstate`` (pure-state algebra), ``measurement`` (spin-measurement
statistics, criteria, reconstruction), ``mixer`` (Heisenberg coupling),
``separator`` (inverting block and blind adaptation), ``sources`` (random
source preparation) and ``cli``.
"""

from .measurement import (
    outcome_probabilities,
    probability_criterion,
    reconstruct_state,
    same_component_criterion,
    sample_outcomes,
)
from .mixer import CouplingParams, mix
from .qstate import (
    PSI_I_MI_1_1,
    SpinDirection,
    basis_change,
    factorize,
    is_unentangled,
    product,
    purity_partial_trace,
    schmidt_number,
    tangle,
)
from .separator import AdaptConfig, adapt, delta_residuals, unmix

__version__ = "0.1.0"
