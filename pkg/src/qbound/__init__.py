"""Boundariness, weight functions and best-distinguishable elements.

Covers quantum states, POVMs and channels (Choi representation) as well as
generic polytope bases.
"""
from .boundariness import (
    BoundarinessReport,
    OptimizerConfig,
    b_channel,
    b_channel_qubit,
    b_erasure,
    b_povm,
    b_state,
    boundariness,
    decompose,
    entangled_radius_iterative,
    is_boundary,
    mixedness_state,
    weight_t_channel,
)
from .convex_base import (
    Membership,
    PolytopeBase,
    base_norm_polytope,
    boundariness_polytope,
    contains,
    max_base_distance,
    mixedness_polytope,
    weight_t,
)
from .qobjects import (
    Povm,
    QuantumChannel,
    QuantumState,
    RandomSource,
    choi_from_kraus,
    depolarizing_channel,
    erasure_channel,
    kraus_from_choi,
    tensor_channels,
)

__version__ = "0.1.0"

__all__ = [
    "BoundarinessReport",
    "OptimizerConfig",
    "b_channel",
    "b_channel_qubit",
    "b_erasure",
    "b_povm",
    "b_state",
    "boundariness",
    "decompose",
    "entangled_radius_iterative",
    "is_boundary",
    "mixedness_state",
    "weight_t_channel",
    "Membership",
    "PolytopeBase",
    "base_norm_polytope",
    "boundariness_polytope",
    "contains",
    "max_base_distance",
    "mixedness_polytope",
    "weight_t",
    "Povm",
    "QuantumChannel",
    "QuantumState",
    "RandomSource",
    "choi_from_kraus",
    "depolarizing_channel",
    "erasure_channel",
    "kraus_from_choi",
    "tensor_channels",
]
