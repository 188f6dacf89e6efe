"""Seeded detector-click sampling and an empirical CHSH estimate.

Random stream: Philox4x64-10 (numpy ``Philox``), keyed by ``(seed, stream)``.
Trial ``k`` consumes the ``k``-th raw 64-bit word of its stream, turned into a
double in [0, 1) from the top 53 bits. Because Philox is counter-based, any
contiguous range of trials can be generated independently and the results
merged by trial index without changing a single draw.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .analysis import coincidence_table
from .circuits import RtoCircuit
from .optics import DEFAULT_CONVENTION, PhaseConvention

RNG_NAME = "philox4x64-10"
RNG_VERSION = 1

# cells below this are exact zeros of the analytic distribution, up to rounding
_ZERO_CELL = 1e-15

_WORDS_PER_COUNTER = 4


def uniforms(seed: int, stream: int, start: int, stop: int) -> np.ndarray:
    """Draws for trials ``start..stop-1`` of one stream."""
    if start < 0 or stop < start:
        raise ValueError("need 0 <= start <= stop")
    bg = np.random.Philox(key=[seed % 2 ** 64, stream % 2 ** 64])
    block, skip = divmod(start, _WORDS_PER_COUNTER)
    if block:
        bg.advance(block)
    raw = bg.random_raw(skip + stop - start)[skip:]
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 2 ** 53)


def _cumulative(c: RtoCircuit) -> np.ndarray:
    p = coincidence_table(c).p.reshape(-1).copy()
    p[p < _ZERO_CELL] = 0.0
    cum = np.cumsum(p / p.sum())
    cum[-1] = 1.0
    return cum


def sample_outcomes(c: RtoCircuit, n: int, seed: int, stream: int = 0,
                    start: int = 0, workers: int = 1, chunk: int = 1 << 16) -> tuple[np.ndarray, np.ndarray]:
    """(a_click, b_click) arrays for trials ``start..start+n-1``.

    One categorical draw over the four detector pairs per trial. ``workers``
    splits the range into chunks evaluated concurrently; output is identical.
    """
    if n < 1:
        raise ValueError("need at least one trial")
    cum = _cumulative(c)

    def draw(lo: int, hi: int) -> np.ndarray:
        return np.searchsorted(cum, uniforms(seed, stream, lo, hi), side="right")

    bounds = [(lo, min(lo + chunk, start + n)) for lo in range(start, start + n, chunk)]
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: draw(*b), bounds))
    else:
        parts = [draw(lo, hi) for lo, hi in bounds]
    cell = np.concatenate(parts)
    return cell // 2 + 1, cell % 2 + 1


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    a_click: int
    b_click: int
    settings: tuple[float, float]


def sample_trials(c: RtoCircuit, n: int, seed: int, stream: int = 0) -> list[TrialRecord]:
    a, b = sample_outcomes(c, n, seed, stream)
    settings = (c.phi_A, c.phi_B)
    return [TrialRecord(k, int(x), int(y), settings) for k, (x, y) in enumerate(zip(a.tolist(), b.tolist()))]


@dataclass(frozen=True, eq=False)
class SampleStats:
    n: int
    counts: np.ndarray

    @classmethod
    def from_clicks(cls, a_click: Sequence[int], b_click: Sequence[int]) -> "SampleStats":
        a = np.asarray(a_click)
        b = np.asarray(b_click)
        counts = np.zeros((2, 2), dtype=np.int64)
        np.add.at(counts, (a - 1, b - 1), 1)
        return cls(int(a.size), counts)

    @classmethod
    def from_trials(cls, trials: Sequence[TrialRecord]) -> "SampleStats":
        return cls.from_clicks([t.a_click for t in trials], [t.b_click for t in trials])

    @property
    def c_hat(self) -> float:
        same = self.counts[0, 0] + self.counts[1, 1]
        return float(2 * same - self.n) / self.n

    @property
    def std_err(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.c_hat ** 2) / self.n)

    def frequencies(self) -> np.ndarray:
        return self.counts / self.n


@dataclass(frozen=True)
class ChshEstimate:
    s_hat: float
    std_err: float
    stats: tuple[SampleStats, ...]

    def sigmas_above(self, bound: float = 2.0) -> float:
        """(S_hat - bound)/std_err; 0 when nothing was measured to exceed it."""
        excess = self.s_hat - bound
        if self.std_err == 0.0:
            return math.inf if excess > 1e-12 else 0.0
        return excess / self.std_err


def chsh_setting_pairs(settings: Sequence[float]) -> list[tuple[float, float]]:
    a, a2, b, b2 = settings
    return [(a, b), (a, b2), (a2, b), (a2, b2)]


def estimate_chsh(settings: Sequence[float], n_per_setting: int, seed: int,
                  conv: PhaseConvention = DEFAULT_CONVENTION) -> ChshEstimate:
    """Sample each of the four (phi_A, phi_B) pairs on its own stream."""
    if len(settings) != 4:
        raise ValueError("CHSH needs four settings (a, a2, b, b2)")
    if n_per_setting < 100:
        raise ValueError("n_per_setting must be at least 100")
    stats = []
    for stream, (x, y) in enumerate(chsh_setting_pairs(settings)):
        a, b = sample_outcomes(RtoCircuit(x, y, conv), n_per_setting, seed, stream)
        stats.append(SampleStats.from_clicks(a, b))
    e = [s.c_hat for s in stats]
    s_hat = abs(e[0] - e[1] + e[2] + e[3])
    err = math.sqrt(sum(s.std_err ** 2 for s in stats))
    return ChshEstimate(s_hat, err, tuple(stats))
