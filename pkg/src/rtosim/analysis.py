"""Coincidence statistics, correlation sweeps, CHSH and the five-phase comparison table."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuits import MziCircuit, RtoCircuit, coincidence_probabilities, mzi_probabilities
from .linalg import wrap_phase
from .optics import DEFAULT_CONVENTION, NonUnitaryConventionError, PhaseConvention

PROB_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class CoincidenceTable:
    """Joint detector probabilities p[i-1, j-1] = P(Ai, Bj) and derived statistics.

    "Same" outcomes are (A1, B1) and (A2, B2); "different" are the mixed pairs.
    """

    p: np.ndarray
    phases: tuple[float, float] | None = None

    def __post_init__(self):
        p = np.array(self.p, dtype=float).reshape(2, 2)
        if np.any(p < -PROB_TOL):
            raise ValueError("negative probability in coincidence table")
        if abs(p.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"coincidence probabilities sum to {p.sum()!r}")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def marginals(self) -> dict[str, float]:
        rows, cols = self.p.sum(axis=1), self.p.sum(axis=0)
        return {"A1": float(rows[0]), "A2": float(rows[1]), "B1": float(cols[0]), "B2": float(cols[1])}

    @property
    def p_same(self) -> float:
        return float(self.p[0, 0] + self.p[1, 1])

    @property
    def p_diff(self) -> float:
        return float(self.p[0, 1] + self.p[1, 0])

    @property
    def correlation(self) -> float:
        return self.p_same - self.p_diff

    @property
    def phase_diff(self) -> float | None:
        return None if self.phases is None else self.phases[1] - self.phases[0]


@dataclass(frozen=True)
class SweepResult:
    grid: tuple[float, ...]
    rows: tuple[CoincidenceTable, ...]

    def correlations(self) -> np.ndarray:
        return np.array([r.correlation for r in self.rows])


def coincidence_table(c: RtoCircuit) -> CoincidenceTable:
    return CoincidenceTable(coincidence_probabilities(c), (c.phi_A, c.phi_B))


def default_grid(points: int = 101) -> np.ndarray:
    if points < 2:
        raise ValueError("a phase grid needs at least 2 points")
    return np.linspace(0.0, math.pi, points)


def correlation_curve(grid: Sequence[float], conv: PhaseConvention = DEFAULT_CONVENTION,
                      phi_A: float = 0.0) -> SweepResult:
    """Evaluate the engine at phi_B - phi_A = each grid value."""
    grid = tuple(float(g) for g in grid)
    if not grid:
        raise ValueError("grid must be nonempty")
    if any(g < 0.0 or g > math.pi for g in grid):
        raise ValueError("grid points must lie within [0, pi]")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")
    rows = tuple(coincidence_table(RtoCircuit(phi_A, phi_A + g, conv)) for g in grid)
    return SweepResult(grid, rows)


def _offset_from_two_points(p0: float, p90: float) -> float:
    # P(delta) = [1 + cos(delta + offset)]/4 sampled at delta = 0 and pi/2
    return wrap_phase(math.atan2(-(4.0 * p90 - 1.0), 4.0 * p0 - 1.0))


def phase_offset_check(conv: PhaseConvention = DEFAULT_CONVENTION) -> tuple[float, float, float]:
    """Fit the constant offsets u of P(A1,B1) and v of P(A1,B2).

    Returns ``(u, v, (v - u) mod 2pi)``; every unitary convention gives pi.
    """
    if not conv.is_unitary():
        raise NonUnitaryConventionError("phase offsets need a unitary convention")
    at0 = coincidence_probabilities(RtoCircuit(0.0, 0.0, conv))
    at90 = coincidence_probabilities(RtoCircuit(0.0, math.pi / 2, conv))
    u = _offset_from_two_points(at0[0, 0], at90[0, 0])
    v = _offset_from_two_points(at0[0, 1], at90[0, 1])
    return u, v, wrap_phase(v - u)


def correlation_at(phi_A: float, phi_B: float, conv: PhaseConvention = DEFAULT_CONVENTION) -> float:
    return coincidence_table(RtoCircuit(phi_A, phi_B, conv)).correlation


def chsh_value(a: float, a2: float, b: float, b2: float,
               conv: PhaseConvention = DEFAULT_CONVENTION) -> float:
    """|E(a,b) - E(a,b2) + E(a2,b) + E(a2,b2)| with E taken from the simulated correlation."""
    e = lambda x, y: correlation_at(x, y, conv)  # noqa: E731
    return abs(e(a, b) - e(a, b2) + e(a2, b) + e(a2, b2))


OPTIMAL_CHSH_SETTINGS = (0.0, math.pi / 2, math.pi / 4, 3 * math.pi / 4)
TABLE1_PHASES = (0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi)

# Percentages as printed in the published comparison table.
PRINTED_TABLE1 = {
    "mzi_p1": (100, 71, 50, 29, 0),
    "p_same": (100, 71, 50, 29, 0),
}

TABLE1_NOTE = (
    "printed table shows 71%/29% at pi/4 and 29%/71% at 3pi/4 for both the single-photon "
    "state and the correlation; the computed same/different probabilities are "
    "(1 +/- cos phase)/2 = 0.854/0.146 there, while 71 matches 100*|cos(pi/4)|"
)


@dataclass(frozen=True)
class Table1Row:
    phase: float
    mzi_p1: float
    mzi_p2: float
    rto_marginal: float  # largest deviation-from-1/2 marginal; 0.5 for every phase
    p_same: float
    p_diff: float
    correlation: float
    printed_mzi_p1_percent: int
    printed_same_percent: int


def table1(phases: Sequence[float] = TABLE1_PHASES,
           conv: PhaseConvention = DEFAULT_CONVENTION) -> list[Table1Row]:
    """Single-photon versus entangled comparison at each phase, all from the engines."""
    if tuple(phases) != TABLE1_PHASES:
        printed = {k: (None,) * len(phases) for k in PRINTED_TABLE1}
    else:
        printed = PRINTED_TABLE1
    rows = []
    for k, phase in enumerate(phases):
        p1, p2 = mzi_probabilities(MziCircuit(0.0, phase, True, conv))
        tab = coincidence_table(RtoCircuit(0.0, phase, conv))
        marg = max(tab.marginals.values(), key=lambda m: abs(m - 0.5))
        rows.append(Table1Row(
            phase=float(phase), mzi_p1=p1, mzi_p2=p2, rto_marginal=marg,
            p_same=tab.p_same, p_diff=tab.p_diff, correlation=tab.correlation,
            printed_mzi_p1_percent=printed["mzi_p1"][k],
            printed_same_percent=printed["p_same"][k],
        ))
    return rows
