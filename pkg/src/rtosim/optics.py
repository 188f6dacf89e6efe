"""Lossless optical elements acting on the two path modes of one photon.

Matrices are indexed ``U[out - 1, in - 1]``. A 50/50 beam splitter sends
input mode ``j`` to output mode ``j`` by transmission and to the other output
by reflection, so its matrix is ``[[t, r], [r, t]]`` with
``t = e^{i t_phase}/sqrt(2)`` and ``r = e^{i r_phase}/sqrt(2)``. That matrix
is unitary iff ``r_phase - t_phase = pi/2 (mod pi)``.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .linalg import NORM_TOL

SQRT1_2 = 1.0 / math.sqrt(2.0)


class NonUnitaryConventionError(ValueError):
    pass


@dataclass(frozen=True)
class PhaseConvention:
    """Fixed reflection/transmission/mirror phases for one simulation run.

    The default is the symmetric beam splitter (reflection picks up pi/2) with
    a pi phase per mirror bounce.
    """

    bs_reflection_phase: float = math.pi / 2
    bs_transmission_phase: float = 0.0
    mirror_phase: float = math.pi

    def __post_init__(self):
        for name in ("bs_reflection_phase", "bs_transmission_phase", "mirror_phase"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.is_unitary():
            raise NonUnitaryConventionError(
                "beam splitter is not unitary: reflection and transmission phases "
                f"must differ by pi/2 mod pi (got {self.bs_reflection_phase!r}, "
                f"{self.bs_transmission_phase!r})")

    def is_unitary(self) -> bool:
        return abs(math.cos(self.bs_reflection_phase - self.bs_transmission_phase)) < NORM_TOL

    @property
    def transmission(self) -> complex:
        return SQRT1_2 * cmath.exp(1j * self.bs_transmission_phase)

    @property
    def reflection(self) -> complex:
        return SQRT1_2 * cmath.exp(1j * self.bs_reflection_phase)

    @property
    def mirror(self) -> complex:
        return cmath.exp(1j * self.mirror_phase)

    def as_dict(self) -> dict[str, float]:
        return {
            "bs_reflection_phase": self.bs_reflection_phase,
            "bs_transmission_phase": self.bs_transmission_phase,
            "mirror_phase": self.mirror_phase,
        }


DEFAULT_CONVENTION = PhaseConvention()


def random_convention(rng: np.random.Generator) -> PhaseConvention:
    """Draw a uniformly random unitary convention."""
    t = rng.uniform(0.0, 2 * math.pi)
    sign = 1.0 if rng.random() < 0.5 else -1.0
    return PhaseConvention(
        bs_reflection_phase=t + sign * math.pi / 2,
        bs_transmission_phase=t,
        mirror_phase=rng.uniform(0.0, 2 * math.pi),
    )


class ElementKind(enum.Enum):
    BEAM_SPLITTER = "BeamSplitter5050"
    MIRROR = "Mirror"
    PHASE_SHIFTER = "PhaseShifter"


@dataclass(frozen=True)
class OpticalElement:
    kind: ElementKind
    shift: float = 0.0
    mode: int = 1  # mode a phase shifter sits on
    swap: bool = False  # mirror only: exchanges the two modes

    def __post_init__(self):
        if self.mode not in (1, 2):
            raise ValueError(f"mode must be 1 or 2, got {self.mode!r}")
        if not math.isfinite(self.shift):
            raise ValueError("shift must be finite")
        if self.kind is not ElementKind.PHASE_SHIFTER and self.shift != 0.0:
            raise ValueError("only a phase shifter carries a shift")
        if self.kind is not ElementKind.MIRROR and self.swap:
            raise ValueError("only a mirror can swap modes")

    @property
    def ports(self) -> dict[int, int]:
        """Input mode -> output mode (transmitted port for a beam splitter)."""
        return {1: 2, 2: 1} if self.swap else {1: 1, 2: 2}


def beam_splitter() -> OpticalElement:
    return OpticalElement(ElementKind.BEAM_SPLITTER)


def mirror(swap: bool = False) -> OpticalElement:
    return OpticalElement(ElementKind.MIRROR, swap=swap)


def phase_shifter(phi: float, mode: int = 1) -> OpticalElement:
    return OpticalElement(ElementKind.PHASE_SHIFTER, shift=float(phi), mode=mode)


def element_unitary(e: OpticalElement, c: PhaseConvention = DEFAULT_CONVENTION) -> np.ndarray:
    if e.kind is ElementKind.BEAM_SPLITTER:
        t, r = c.transmission, c.reflection
        return np.array([[t, r], [r, t]], dtype=np.complex128)
    if e.kind is ElementKind.PHASE_SHIFTER:
        d = [cmath.exp(1j * e.shift), 1.0] if e.mode == 1 else [1.0, cmath.exp(1j * e.shift)]
        return np.diag(np.array(d, dtype=np.complex128))
    perm = np.array([[0, 1], [1, 0]] if e.swap else [[1, 0], [0, 1]], dtype=np.complex128)
    return c.mirror * perm


@dataclass(frozen=True)
class PathStep:
    """One photon passing through one element, entering on ``in_mode``."""

    subsystem: str
    element: OpticalElement
    in_mode: int
    out_mode: int

    def __post_init__(self):
        if self.in_mode not in (1, 2) or self.out_mode not in (1, 2):
            raise ValueError("path modes must be 1 or 2")
        e = self.element
        if e.kind is not ElementKind.BEAM_SPLITTER and e.ports[self.in_mode] != self.out_mode:
            raise ValueError(f"{e.kind.value} cannot route mode {self.in_mode} to {self.out_mode}")
        if e.kind is ElementKind.PHASE_SHIFTER and e.mode != self.in_mode:
            raise ValueError("path does not traverse this phase shifter")

    @property
    def port(self) -> str | None:
        if self.element.kind is not ElementKind.BEAM_SPLITTER:
            return None
        return "transmit" if self.in_mode == self.out_mode else "reflect"


@dataclass(frozen=True)
class OpticalPath:
    detector_pair: tuple[int, int]
    branch: str  # "solid" or "dashed"
    elements: tuple[PathStep, ...] = field(default_factory=tuple)

    def beam_splitter_ports(self) -> list[PathStep]:
        return [s for s in self.elements if s.port is not None]


def step_factor(step: PathStep, c: PhaseConvention = DEFAULT_CONVENTION) -> complex:
    """Amplitude picked up by one element traversal, straight from the convention."""
    kind = step.element.kind
    if kind is ElementKind.BEAM_SPLITTER:
        phase = c.bs_transmission_phase if step.port == "transmit" else c.bs_reflection_phase
        return SQRT1_2 * cmath.exp(1j * phase)
    if kind is ElementKind.MIRROR:
        return cmath.exp(1j * c.mirror_phase)
    return cmath.exp(1j * step.element.shift)


def accumulate_path_phase(path: OpticalPath | Sequence[PathStep],
                          c: PhaseConvention = DEFAULT_CONVENTION) -> complex:
    """Product of the per-element amplitude factors along a path."""
    steps = path.elements if isinstance(path, OpticalPath) else tuple(path)
    if not steps:
        raise ValueError("cannot accumulate phase along an empty path")
    # sum phases and multiply moduli separately so long paths stay exact
    n_ports = 0
    phase = 0.0
    for s in steps:
        if s.port is not None:
            n_ports += 1
            phase += c.bs_transmission_phase if s.port == "transmit" else c.bs_reflection_phase
        elif s.element.kind is ElementKind.MIRROR:
            phase += c.mirror_phase
        else:
            phase += s.element.shift
    return 0.5 ** (n_ports / 2) * cmath.exp(1j * phase)
