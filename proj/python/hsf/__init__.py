"""Python bindings for the half-space flow-equation library."""

from ._core import (
    IncompleteFlowError,
    PreconditionError,
    amputation,
    bulk_tadpole,
    cdot_momentum_integral,
    closed_form_propagator,
    enumerate_forests,
    flowing_propagator,
    kernel,
    power_counting,
    proper_time_propagator,
    run_lemma,
    surface_kernel,
    surface_tadpole,
    v2_bound,
    validate_forest,
)

__all__ = [
    "IncompleteFlowError",
    "PreconditionError",
    "amputation",
    "bulk_tadpole",
    "cdot_momentum_integral",
    "closed_form_propagator",
    "enumerate_forests",
    "flowing_propagator",
    "kernel",
    "power_counting",
    "proper_time_propagator",
    "run_lemma",
    "surface_kernel",
    "surface_tadpole",
    "v2_bound",
    "validate_forest",
]
