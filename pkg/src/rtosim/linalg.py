"""Complex linear algebra over small labeled tensor-product path spaces.

Amplitudes are plain Python/numpy ``complex`` values. A basis ket is a tuple
of :class:`BasisLabel`, one per subsystem, always sorted by subsystem id, and
composite bases are ordered lexicographically, so the two-photon basis is
``(A1B1, A1B2, A2B1, A2B2)`` everywhere in the package.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence, Union

import numpy as np

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
EIG_TOL = 1e-10

Mode = Union[int, str]

READY = "ready"


def wrap_phase(theta: float) -> float:
    """Wrap an angle in radians to [0, 2*pi)."""
    w = math.fmod(theta, 2 * math.pi)
    if w < 0:
        w += 2 * math.pi
    # fmod of a value just below 2*pi can round up to exactly 2*pi
    return 0.0 if w >= 2 * math.pi else w


def amplitude_phase(z: complex) -> float:
    """Phase of a nonzero amplitude, wrapped to [0, 2*pi)."""
    if z == 0:
        raise ValueError("phase is undefined for a zero amplitude")
    return wrap_phase(cmath.phase(z))


def modulus_squared(z: complex) -> float:
    return z.real * z.real + z.imag * z.imag


def _mode_key(mode: Mode) -> tuple:
    return (0, mode, "") if isinstance(mode, int) else (1, 0, mode)


@dataclass(frozen=True, order=False)
class BasisLabel:
    subsystem: str
    mode: Mode

    def sort_key(self) -> tuple:
        return (self.subsystem, _mode_key(self.mode))

    def __str__(self) -> str:
        return f"{self.subsystem}{self.mode}" if isinstance(self.mode, int) else f"{self.subsystem}:{self.mode}"


Ket = tuple  # tuple[BasisLabel, ...]


def _ket_key(ket: Ket) -> tuple:
    return tuple(lbl.sort_key() for lbl in ket)


def ket_name(ket: Ket) -> str:
    return "".join(str(lbl) for lbl in ket)


def canonical_basis(subsystems: Sequence[str] | str) -> tuple[Ket, ...]:
    """Lexicographic two-mode basis; a string like ``"AB"`` names one subsystem per character."""
    if isinstance(subsystems, str):
        subsystems = tuple(subsystems)
    subs = sorted(subsystems)
    if len(set(subs)) != len(subs):
        raise ValueError(f"duplicate subsystem ids: {subsystems!r}")
    return tuple(
        tuple(BasisLabel(s, m) for s, m in zip(subs, modes))
        for modes in product((1, 2), repeat=len(subs))
    )


AB_BASIS = canonical_basis("AB")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized ket over an ordered basis of labeled kets."""

    basis: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        basis = tuple(tuple(sorted(k, key=BasisLabel.sort_key)) for k in self.basis)
        amps = _frozen(self.amplitudes).reshape(-1)
        if len(basis) != amps.size:
            raise ValueError(f"{len(basis)} basis kets but {amps.size} amplitudes")
        if len(set(basis)) != len(basis):
            raise ValueError("basis labels must be distinct")
        subs = {tuple(lbl.subsystem for lbl in k) for k in basis}
        if len(subs) != 1:
            raise ValueError("all basis kets must span the same subsystems")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: sum |amp|^2 = {norm!r}")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, subsystems: Sequence[str] | str, amplitudes: Iterable[complex],
                        normalize: bool = False) -> "StateVector":
        """Build a state over the canonical basis of ``subsystems``.

        With ``normalize=True`` the amplitudes are rescaled to unit norm first.
        """
        amps = np.asarray(list(amplitudes), dtype=np.complex128)
        if normalize:
            n = np.linalg.norm(amps)
            if n == 0:
                raise ValueError("cannot normalize the zero vector")
            amps = amps / n
        return cls(canonical_basis(subsystems), amps)

    @property
    def subsystems(self) -> tuple[str, ...]:
        return tuple(lbl.subsystem for lbl in self.basis[0])

    @property
    def dim(self) -> int:
        return len(self.basis)

    def amplitude(self, ket: Ket) -> complex:
        ket = tuple(sorted(ket, key=BasisLabel.sort_key))
        try:
            return complex(self.amplitudes[self.basis.index(ket)])
        except ValueError:
            return 0j

    def inner(self, other: "StateVector") -> complex:
        """<self|other>, matching kets by label rather than position."""
        return sum((self.amplitude(k).conjugate() * other.amplitude(k) for k in set(self.basis) | set(other.basis)), 0j)

    def is_canonical(self) -> bool:
        return self.basis == canonical_basis(self.subsystems)

    def __repr__(self) -> str:
        terms = ", ".join(f"{ket_name(k)}: {complex(a):.6g}" for k, a in zip(self.basis, self.amplitudes))
        return f"StateVector({terms})"


def basis_state(subsystem: str, mode: Mode) -> StateVector:
    if mode == READY:
        return StateVector(((BasisLabel(subsystem, READY),),), [1.0])
    if mode not in (1, 2):
        raise ValueError(f"mode must be 1, 2 or {READY!r}, got {mode!r}")
    return StateVector.from_amplitudes(subsystem, [1.0, 0.0] if mode == 1 else [0.0, 1.0])


def superposition(subsystem: str = "A", phase: float = 0.0) -> StateVector:
    """(|1> + e^{i phase}|2>)/sqrt(2) for one subsystem."""
    return StateVector.from_amplitudes(subsystem, [1.0, cmath.exp(1j * phase)], normalize=True)


def entangled_state(phase: float = 0.0) -> StateVector:
    """(|A1>|B1> + e^{i phase}|A2>|B2>)/sqrt(2)."""
    return StateVector.from_amplitudes("AB", [1.0, 0.0, 0.0, cmath.exp(1j * phase)], normalize=True)


def tensor(sv_a: StateVector, sv_b: StateVector) -> StateVector:
    """Product state; the composite basis is re-sorted into canonical order."""
    overlap = set(sv_a.subsystems) & set(sv_b.subsystems)
    if overlap:
        raise ValueError(f"subsystems overlap: {sorted(overlap)}")
    pairs = [(ka + kb, a * b) for (ka, a), (kb, b) in product(zip(sv_a.basis, sv_a.amplitudes),
                                                                zip(sv_b.basis, sv_b.amplitudes))]
    pairs = [(tuple(sorted(k, key=BasisLabel.sort_key)), amp) for k, amp in pairs]
    pairs.sort(key=lambda p: _ket_key(p[0]))
    return StateVector(tuple(k for k, _ in pairs), [amp for _, amp in pairs])


# ---------------------------------------------------------------- eigenvalues

def eigvalsh_2x2(m: np.ndarray) -> np.ndarray:
    """Closed-form eigenvalues of a 2x2 Hermitian matrix, ascending."""
    a, d = m[0, 0].real, m[1, 1].real
    b = m[0, 1]
    half_tr = 0.5 * (a + d)
    r = math.hypot(0.5 * (a - d), abs(b))
    return np.array([half_tr - r, half_tr + r])


def _jacobi_symmetric(s: np.ndarray, tol: float = 1e-15, max_sweeps: int = 100) -> np.ndarray:
    # cyclic Jacobi rotations on a real symmetric matrix
    a = np.array(s, dtype=float)
    n = a.shape[0]
    scale = max(np.max(np.abs(a)), 1.0)
    for _ in range(max_sweeps):
        off = math.sqrt(max(0.0, float(np.sum(a ** 2) - np.sum(np.diag(a) ** 2))))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                sn = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = sn
                rot[q, p] = -sn
                a = rot.T @ a @ rot
    else:
        raise RuntimeError("Jacobi eigenvalue iteration did not converge")
    return np.sort(np.diag(a))


def eigvalsh(m: np.ndarray) -> np.ndarray:
    """Eigenvalues of a small Hermitian matrix, ascending.

    2x2 uses the closed form. Larger matrices go through the real symmetric
    embedding [[Re, -Im], [Im, Re]], whose spectrum is each eigenvalue twice.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.shape == (2, 2):
        return eigvalsh_2x2(m)
    if m.shape == (1, 1):
        return np.array([m[0, 0].real])
    re, im = m.real, m.imag
    emb = np.block([[re, -im], [im, re]])
    return _jacobi_symmetric(emb)[::2]


# -------------------------------------------------------------- density matrix

@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite operator over a labeled basis."""

    basis: tuple
    entries: np.ndarray

    def __post_init__(self):
        rho = _frozen(self.entries)
        n = len(self.basis)
        if rho.shape != (n, n):
            raise ValueError(f"expected {n}x{n} entries, got shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = complex(np.trace(rho))
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"density matrix trace is {tr!r}, not 1")
        if eigvalsh(rho)[0] < -EIG_TOL:
            raise ValueError("density matrix is not positive semidefinite")
        object.__setattr__(self, "basis", tuple(self.basis))
        object.__setattr__(self, "entries", rho)

    @property
    def subsystems(self) -> tuple[str, ...]:
        return tuple(lbl.subsystem for lbl in self.basis[0])

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))

    def eigenvalues(self) -> np.ndarray:
        return eigvalsh(self.entries)

    def __repr__(self) -> str:
        names = [ket_name(k) for k in self.basis]
        return f"DensityMatrix(basis={names}, entries=\n{np.array2string(self.entries, precision=6)})"


def outer(sv: StateVector) -> DensityMatrix:
    amps = sv.amplitudes
    norm = float(np.sum(np.abs(amps) ** 2))
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError("outer product requires a normalized state")
    return DensityMatrix(sv.basis, np.outer(amps, amps.conj()))


def partial_trace(rho: DensityMatrix, keep: str) -> DensityMatrix:
    """Reduced density matrix of subsystem ``keep`` of a bipartite state."""
    subs = rho.subsystems
    if keep not in subs:
        raise ValueError(f"unknown subsystem {keep!r}; state spans {subs}")
    if len(subs) != 2:
        raise ValueError("partial_trace expects a two-subsystem composite state")
    k = subs.index(keep)
    kept = sorted({ket[k] for ket in rho.basis}, key=BasisLabel.sort_key)
    index = {lbl: i for i, lbl in enumerate(kept)}
    out = np.zeros((len(kept), len(kept)), dtype=np.complex128)
    for i, ki in enumerate(rho.basis):
        for j, kj in enumerate(rho.basis):
            if ki[1 - k] == kj[1 - k]:
                out[index[ki[k]], index[kj[k]]] += rho.entries[i, j]
    return DensityMatrix(tuple((lbl,) for lbl in kept), out)
