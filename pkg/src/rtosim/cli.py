"""Command-line front end: sweeps, Bell test, click samples and the comparison table as CSV."""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import __version__
from .analysis import (
    OPTIMAL_CHSH_SETTINGS,
    TABLE1_NOTE,
    correlation_at,
    correlation_curve,
    default_grid,
    phase_offset_check,
    table1,
)
from .circuits import MziCircuit, RtoCircuit, mzi_probabilities
from .montecarlo import RNG_NAME, RNG_VERSION, chsh_setting_pairs, estimate_chsh, sample_outcomes
from .optics import DEFAULT_CONVENTION, PhaseConvention

COMMANDS = ("mzi", "rto-sweep", "bell", "sample", "table1", "offsets")

RTO_SWEEP_COLUMNS = ("phase_diff", "p11", "p12", "p21", "p22", "pA1", "pB1", "p_same", "p_diff", "correlation")
SAMPLE_COLUMNS = ("trial_index", "phi_A", "phi_B", "a_click", "b_click")
TABLE1_COLUMNS = ("phase", "mzi_p1", "mzi_p2", "rto_marginal", "p_same", "p_diff", "correlation")
MZI_COLUMNS = ("phase_diff", "p_b1", "p_b2")
BELL_COLUMNS = ("setting", "phi_A", "phi_B", "n", "n11", "n12", "n21", "n22", "e_hat", "std_err", "e_exact")
OFFSETS_COLUMNS = ("u", "v", "difference")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    command: str
    grid_points: int = 101
    seed: int = 42
    n_trials: int = 10000
    output_path: str | None = None
    phi_a: float = 0.0
    phi_b: float = 0.0
    bs_reflection_phase: float | None = None
    bs_transmission_phase: float | None = None
    mirror_phase: float | None = None
    no_bs2: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.grid_points < 2:
            raise UsageError("--grid-points must be at least 2")
        if self.n_trials < 1:
            raise UsageError("--n-trials must be at least 1")
        if self.command == "bell" and self.n_trials < 100:
            raise UsageError("bell needs --n-trials of at least 100 per setting")
        if self.no_bs2 and self.command != "mzi":
            raise UsageError("--no-bs2 only applies to mzi")

    @property
    def out(self) -> str:
        return self.output_path or f"{self.command}.csv"

    def convention(self) -> PhaseConvention:
        overrides = {
            k: getattr(self, k)
            for k in ("bs_reflection_phase", "bs_transmission_phase", "mirror_phase")
            if getattr(self, k) is not None
        }
        try:
            return PhaseConvention(**{**DEFAULT_CONVENTION.as_dict(), **overrides})
        except ValueError as exc:
            raise UsageError(str(exc)) from None


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".15g")


def _comment(cfg: RunConfig, conv: PhaseConvention) -> str:
    conv_s = ",".join(f"{k}={fmt(v)}" for k, v in conv.as_dict().items())
    return (f"# rtosim {__version__} command={cfg.command} seed={cfg.seed} "
            f"rng={RNG_NAME}/v{RNG_VERSION} convention={conv_s}")


def _csv(comments: Sequence[str], columns: Sequence[str], rows) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(c + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _mzi(cfg, conv):
    rows = []
    for d in default_grid(cfg.grid_points):
        p1, p2 = mzi_probabilities(MziCircuit(cfg.phi_a, cfg.phi_a + d, not cfg.no_bs2, conv))
        rows.append((d, p1, p2))
    summary = (f"mzi: {len(rows)} points, bs2 {'absent' if cfg.no_bs2 else 'present'}, "
               f"P(B1) {rows[0][1]:.6f} at 0 -> {rows[-1][1]:.6f} at pi")
    return MZI_COLUMNS, rows, [], summary


def _rto_sweep(cfg, conv):
    sweep = correlation_curve(default_grid(cfg.grid_points), conv, phi_A=cfg.phi_a)
    rows = []
    for g, t in zip(sweep.grid, sweep.rows):
        m = t.marginals
        rows.append((g, t.p[0, 0], t.p[0, 1], t.p[1, 0], t.p[1, 1], m["A1"], m["B1"],
                     t.p_same, t.p_diff, t.correlation))
    worst = max(abs(r[-1] - math.cos(r[0])) for r in rows)
    summary = f"rto-sweep: {len(rows)} points, max |C - cos(phase_diff)| = {worst:.3e}"
    return RTO_SWEEP_COLUMNS, rows, [], summary


def _bell(cfg, conv):
    est = estimate_chsh(OPTIMAL_CHSH_SETTINGS, cfg.n_trials, cfg.seed, conv)
    rows = []
    for k, ((x, y), st) in enumerate(zip(chsh_setting_pairs(OPTIMAL_CHSH_SETTINGS), est.stats)):
        rows.append((k, x, y, st.n, *st.counts.reshape(-1), st.c_hat, st.std_err, correlation_at(x, y, conv)))
    s_exact = abs(rows[0][-1] - rows[1][-1] + rows[2][-1] + rows[3][-1])
    summary = (f"bell: S_hat={est.s_hat:.6f} std_err={est.std_err:.6f} "
               f"sigma_above_2={est.sigmas_above(2.0):.2f} S_exact={s_exact:.12f} n_per_setting={cfg.n_trials}")
    comments = [f"# S_hat={fmt(est.s_hat)} std_err={fmt(est.std_err)} S_exact={fmt(s_exact)}"]
    return BELL_COLUMNS, rows, comments, summary


def _sample(cfg, conv):
    c = RtoCircuit(cfg.phi_a, cfg.phi_b, conv)
    a, b = sample_outcomes(c, cfg.n_trials, cfg.seed)
    rows = [(k, cfg.phi_a, cfg.phi_b, int(x), int(y)) for k, (x, y) in enumerate(zip(a.tolist(), b.tolist()))]
    c_hat = float(np.mean(np.where(a == b, 1.0, -1.0)))
    summary = (f"sample: n={cfg.n_trials} phase_diff={fmt(c.phase_diff)} c_hat={c_hat:.6f} "
               f"std_err={math.sqrt(max(0.0, 1 - c_hat ** 2) / cfg.n_trials):.6f}")
    return SAMPLE_COLUMNS, rows, [], summary


def _table1(cfg, conv):
    report = table1(conv=conv)
    rows = [(r.phase, r.mzi_p1, r.mzi_p2, r.rto_marginal, r.p_same, r.p_diff, r.correlation) for r in report]
    printed = " ".join(f"{fmt(r.phase)}:{r.printed_mzi_p1_percent}/{r.printed_same_percent}" for r in report)
    comments = [f"# note: {TABLE1_NOTE}", f"# printed percentages (phase:mzi_p1/p_same): {printed}"]
    summary = "table1: " + "; ".join(f"C({fmt(r.phase)})={r.correlation:+.4f}" for r in report)
    return TABLE1_COLUMNS, rows, comments, summary


def _offsets(cfg, conv):
    u, v, diff = phase_offset_check(conv)
    summary = f"offsets: u={u:.12f} v={v:.12f} v-u={diff:.12f} (pi={math.pi:.12f})"
    return OFFSETS_COLUMNS, [(u, v, diff)], [], summary


_HANDLERS = {"mzi": _mzi, "rto-sweep": _rto_sweep, "bell": _bell, "sample": _sample,
             "table1": _table1, "offsets": _offsets}


def render(cfg: RunConfig) -> tuple[str, str]:
    """(csv text, one-line summary) for a configuration."""
    conv = cfg.convention()
    columns, rows, extra, summary = _HANDLERS[cfg.command](cfg, conv)
    return _csv([_comment(cfg, conv), *extra], columns, rows), summary


def run(cfg: RunConfig) -> int:
    text, summary = render(cfg)
    try:
        with open(cfg.out, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"rtosim: cannot write {cfg.out}: {exc.strerror or exc}", file=sys.stderr)
        return 2
    print(summary)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--grid-points", type=int, default=101)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--n-trials", type=int, default=10000)
    common.add_argument("--out", default=None, help="CSV path (default: <command>.csv)")
    common.add_argument("--phi-a", type=float, default=0.0)
    common.add_argument("--phi-b", type=float, default=0.0)
    common.add_argument("--bs-reflection-phase", type=float, default=None)
    common.add_argument("--bs-transmission-phase", type=float, default=None)
    common.add_argument("--mirror-phase", type=float, default=None)

    parser = _Parser(prog="rtosim", description=__doc__)
    parser.add_argument("--version", action="version", version=f"rtosim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "mzi":
            p.add_argument("--no-bs2", action="store_true", help="remove the second beam splitter")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(
            command=args.command, grid_points=args.grid_points, seed=args.seed,
            n_trials=args.n_trials, output_path=args.out, phi_a=args.phi_a, phi_b=args.phi_b,
            bs_reflection_phase=args.bs_reflection_phase,
            bs_transmission_phase=args.bs_transmission_phase,
            mirror_phase=args.mirror_phase, no_bs2=getattr(args, "no_bs2", False),
        )
        cfg.convention()
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"rtosim: error: {exc}", file=sys.stderr)
        return 1
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
