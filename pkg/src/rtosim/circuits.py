"""Mach-Zehnder and two-photon (RTO) interferometer topologies.

Two-photon layout, per station, in the order the photon meets them::

    A, solid arm (mode 1):  mirror -> BS
    A, dashed arm (mode 2): mirror -> phase shifter phi_A -> BS
    B, solid arm (mode 1):  mirror -> phase shifter phi_B -> BS
    B, dashed arm (mode 2): mirror -> BS

The source emits (|A1>|B1> + |A2>|B2>)/sqrt(2): the solid biphoton path is
the mode-1 pair, the dashed one the mode-2 pair. Station A reads beam
splitter output port j as detector Aj. Station B reads output port j as
detector B(3-j); with a symmetric beam splitter this is the labeling under
which zero nonlocal phase gives perfectly correlated ("same") outcomes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .optics import (
    DEFAULT_CONVENTION,
    OpticalElement,
    OpticalPath,
    PathStep,
    PhaseConvention,
    accumulate_path_phase,
    beam_splitter,
    element_unitary,
    mirror,
    phase_shifter,
)

SOURCE_WEIGHT = 1.0 / math.sqrt(2.0)

DETECTOR_PAIRS: tuple[tuple[int, int], ...] = ((1, 1), (1, 2), (2, 1), (2, 2))

# beam-splitter output port -> detector index, per station
DETECTOR_OF_PORT = {"A": {1: 1, 2: 2}, "B": {1: 2, 2: 1}}
PORT_OF_DETECTOR = {s: {d: p for p, d in m.items()} for s, m in DETECTOR_OF_PORT.items()}

BRANCH_MODE = {"solid": 1, "dashed": 2}


def _check_finite(**phases: float) -> None:
    for name, value in phases.items():
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class MziCircuit:
    phi1: float = 0.0
    phi2: float = 0.0
    bs2_present: bool = True
    convention: PhaseConvention = field(default=DEFAULT_CONVENTION)

    def __post_init__(self):
        _check_finite(phi1=self.phi1, phi2=self.phi2)


@dataclass(frozen=True)
class RtoCircuit:
    phi_A: float = 0.0
    phi_B: float = 0.0
    convention: PhaseConvention = field(default=DEFAULT_CONVENTION)

    def __post_init__(self):
        _check_finite(phi_A=self.phi_A, phi_B=self.phi_B)

    @property
    def phase_diff(self) -> float:
        return self.phi_B - self.phi_A


def mzi_probabilities(c: MziCircuit) -> tuple[float, float]:
    """Detection probabilities (P_B1, P_B2) for a single photon.

    The photon enters BS1 on input port 2, so reflection puts it on path 1
    (mode 1) and transmission on path 2. phi1 sits on path 1 and phi2 on path
    2. With BS2 in place detector B1 is BS2 output port 1; without it, B1
    watches path 1 directly.
    """
    conv = c.convention
    state = np.array([0.0, 1.0], dtype=np.complex128)
    elements = [beam_splitter(), mirror(), phase_shifter(c.phi1, 1), phase_shifter(c.phi2, 2)]
    if c.bs2_present:
        elements.append(beam_splitter())
    for e in elements:
        state = element_unitary(e, conv) @ state
    p = np.abs(state) ** 2
    total = p.sum()
    return float(p[0] / total), float(p[1] / total)


def station_elements(c: RtoCircuit, station: str) -> tuple[OpticalElement, OpticalElement, OpticalElement]:
    """(mirror, phase shifter, beam splitter) of one station, in beam order."""
    if station == "A":
        return mirror(), phase_shifter(c.phi_A, 2), beam_splitter()
    if station == "B":
        return mirror(), phase_shifter(c.phi_B, 1), beam_splitter()
    raise ValueError(f"unknown station {station!r}")


def _check_pair(detector_pair) -> tuple[int, int]:
    try:
        pair = tuple(int(d) for d in detector_pair)
    except (TypeError, ValueError):
        raise ValueError(f"invalid detector pair {detector_pair!r}") from None
    if pair not in DETECTOR_PAIRS:
        raise ValueError(f"invalid detector pair {detector_pair!r}; expected one of {DETECTOR_PAIRS}")
    return pair


def _station_steps(c: RtoCircuit, station: str, arm: int, detector: int) -> list[PathStep]:
    mir, shifter, bs = station_elements(c, station)
    steps = [PathStep(station, mir, arm, arm)]
    if shifter.mode == arm:
        steps.append(PathStep(station, shifter, arm, arm))
    steps.append(PathStep(station, bs, arm, PORT_OF_DETECTOR[station][detector]))
    return steps


def enumerate_paths(c: RtoCircuit, detector_pair) -> list[OpticalPath]:
    """The solid and dashed biphoton paths ending on detectors (Ai, Bj)."""
    i, j = _check_pair(detector_pair)
    paths = []
    for branch, arm in BRANCH_MODE.items():
        steps = _station_steps(c, "A", arm, i) + _station_steps(c, "B", arm, j)
        paths.append(OpticalPath((i, j), branch, tuple(steps)))
    return paths


def coincidence_amplitude(c: RtoCircuit, detector_pair) -> complex:
    """Sum over the two biphoton paths, weighted by the source amplitude."""
    return sum((SOURCE_WEIGHT * accumulate_path_phase(p, c.convention)
                for p in enumerate_paths(c, detector_pair)), 0j)


def coincidence_probabilities(c: RtoCircuit) -> np.ndarray:
    """2x2 array p[i-1, j-1] = |amp(Ai, Bj)|^2 from the path-sum engine."""
    p = np.empty((2, 2))
    for i, j in DETECTOR_PAIRS:
        a = coincidence_amplitude(c, (i, j))
        p[i - 1, j - 1] = a.real * a.real + a.imag * a.imag
    return p
