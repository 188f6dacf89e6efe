"""Two-route simulator for single-photon and entangled two-photon interferometry."""

__version__ = "0.1.0"

from .linalg import (
    BasisLabel,
    DensityMatrix,
    StateVector,
    basis_state,
    entangled_state,
    outer,
    partial_trace,
    superposition,
    tensor,
)
from .optics import PhaseConvention
from .circuits import MziCircuit, RtoCircuit

__all__ = [
    "BasisLabel", "DensityMatrix", "StateVector", "basis_state", "entangled_state",
    "outer", "partial_trace", "superposition", "tensor", "PhaseConvention",
    "MziCircuit", "RtoCircuit",
]
