"""Von Neumann pre-measurement, subsystem coherence, and the state-vector oracle.

The detector B is treated as a two-mode system like a photon, plus a formal
``ready`` label that only appears before the measurement interaction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .analysis import CoincidenceTable
from .circuits import DETECTOR_OF_PORT, RtoCircuit, station_elements
from .linalg import (
    AB_BASIS,
    NORM_TOL,
    READY,
    BasisLabel,
    StateVector,
    canonical_basis,
    outer,
    partial_trace,
)
from .optics import element_unitary


def _default_calibration() -> dict:
    return {
        (BasisLabel("A", j), BasisLabel("B", READY)): (BasisLabel("A", j), BasisLabel("B", j))
        for j in (1, 2)
    }


@dataclass(frozen=True)
class MeasurementMap:
    """|Aj>|ready> -> |Aj>|Bj>, extended to superpositions by linearity."""

    calibration: dict = field(default_factory=_default_calibration)

    def __post_init__(self):
        targets = list(self.calibration.values())
        # distinct orthonormal targets make the map an isometry on its domain
        if len(set(targets)) != len(targets):
            raise ValueError("calibration must send distinct inputs to distinct outputs")
        if any(t not in AB_BASIS for t in targets):
            raise ValueError("calibration targets must be composite AB basis kets")


def apply_measurement(state: StateVector, m: MeasurementMap = MeasurementMap()) -> StateVector:
    out = dict.fromkeys(AB_BASIS, 0j)
    for ket, amp in zip(state.basis, state.amplitudes):
        if amp == 0:
            continue
        if ket not in m.calibration:
            names = "".join(str(lbl) for lbl in ket)
            raise ValueError(f"input component {names} is outside the calibrated subspace")
        out[m.calibration[ket]] += amp
    return StateVector(AB_BASIS, [out[k] for k in AB_BASIS])


def propagate(state: StateVector, unitaries: Sequence[tuple[str, np.ndarray]]) -> StateVector:
    """Apply each (subsystem, 2x2 unitary) in order as U (x) I or I (x) U."""
    if not state.is_canonical():
        raise ValueError("propagate needs a state over two-mode path bases (no 'ready' labels)")
    subs = state.subsystems
    psi = np.array(state.amplitudes).reshape((2,) * len(subs))
    for sub, u in unitaries:
        u = np.asarray(u, dtype=np.complex128)
        if u.shape != (2, 2):
            raise ValueError(f"expected a 2x2 unitary, got shape {u.shape}")
        if sub not in subs:
            raise ValueError(f"state has no subsystem {sub!r}")
        axis = subs.index(sub)
        psi = np.moveaxis(np.tensordot(u, psi, axes=([1], [axis])), 0, axis)
    return StateVector(state.basis, psi.reshape(-1))


def rto_unitaries(c: RtoCircuit) -> list[tuple[str, np.ndarray]]:
    """Per-station matrices for the two-photon interferometer, ending with detector relabeling."""
    ops = []
    for station in ("A", "B"):
        for e in station_elements(c, station):
            ops.append((station, element_unitary(e, c.convention)))
        relabel = np.zeros((2, 2), dtype=np.complex128)
        for port, det in DETECTOR_OF_PORT[station].items():
            relabel[det - 1, port - 1] = 1.0
        ops.append((station, relabel))
    return ops


def oracle_probabilities(c: RtoCircuit, source: StateVector | None = None) -> np.ndarray:
    """p[i-1, j-1] by propagating the source state through the full interferometer."""
    if source is None:
        source = StateVector.from_amplitudes("AB", [1.0, 0.0, 0.0, 1.0], normalize=True)
    out = propagate(source, rto_unitaries(c))
    return (np.abs(out.amplitudes) ** 2).reshape(2, 2)


@dataclass(frozen=True)
class CoherenceReport:
    subsystem: str
    offdiag_magnitude: float
    purity: float


def coherence_report(state: StateVector, subsystem: str) -> CoherenceReport:
    rho = partial_trace(outer(state), subsystem)
    return CoherenceReport(subsystem, float(abs(rho.entries[0, 1])), rho.purity())


def outcome_distribution(state: StateVector) -> CoincidenceTable:
    """Born-rule table of detector pairs read directly off the composite state."""
    if state.basis != canonical_basis("AB"):
        raise ValueError("outcome_distribution needs a state over the A (x) B path basis")
    norm = float(np.sum(np.abs(state.amplitudes) ** 2))
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError("state is not normalized")
    a = state.amplitudes
    return CoincidenceTable((a.real ** 2 + a.imag ** 2).reshape(2, 2))
