"""Dense state vectors over registers of two-level atoms and Fock-truncated cavities.

Basis ordering is row-major over the register: the first subsystem varies
slowest. Atom levels are ``g = 0`` and ``e = 1``; cavity levels are photon
numbers ``0..cutoff``.

Amplitudes stay real under every operation here (real rotations, real
projections) but are stored as complex128.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import ConfigError, ImpossibleOutcome

G, E = 0, 1
ATOM_LEVELS = {"g": G, "e": E}
IMPOSSIBLE_THRESHOLD = 1e-14
LEAKAGE_THRESHOLD = 1e-10


class InteractionMode(enum.Enum):
    """How an atom exchanges an excitation with a cavity.

    REPLICATION ("paper") rotates only the single-excitation pair {|e,0>, |g,1>}; an excited
    atom leaves an occupied cavity untouched. EXACT rotates every pair
    {|e,n>, |g,n+1>} by ``theta * sqrt(n + 1)``.
    """

    REPLICATION = "paper"
    EXACT = "exact"

    @property
    def default_cutoff(self) -> int:
        return 1 if self is InteractionMode.REPLICATION else 2

    @classmethod
    def parse(cls, value) -> "InteractionMode":
        if isinstance(value, cls):
            return value
        aliases = {"replication": "paper", "exactjc": "exact"}
        key = str(value).lower()
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ConfigError(f"mode must be 'paper' or 'exact', got {value!r}") from None


@dataclass(frozen=True)
class Subsystem:
    label: str
    kind: str
    dim: int

    def __post_init__(self):
        if self.kind not in ("atom", "cavity"):
            raise ConfigError(f"kind must be 'atom' or 'cavity', got {self.kind!r}")
        if self.dim < 2:
            raise ConfigError(f"{self.label}: dim must be >= 2")
        if self.kind == "atom" and self.dim != 2:
            raise ConfigError(f"{self.label}: atoms have dim 2")

    @property
    def cutoff(self) -> int:
        return self.dim - 1


def atom(label: str) -> Subsystem:
    return Subsystem(label, "atom", 2)


def cavity(label: str, cutoff: int = 1) -> Subsystem:
    return Subsystem(label, "cavity", cutoff + 1)


@dataclass(frozen=True)
class LeakageRecord:
    """Amplitude an EXACT transit left stranded on ``|e, cutoff>``."""

    atom: str
    cavity: str
    amplitude: float


@dataclass(frozen=True, eq=False)
class QuantumState:
    register: tuple[Subsystem, ...]
    amplitudes: np.ndarray
    leakage: tuple[LeakageRecord, ...] = field(default=())

    def __post_init__(self):
        labels = [s.label for s in self.register]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"duplicate labels in register: {labels}")
        if self.amplitudes.shape != (math.prod(self.dims),):
            raise ConfigError("amplitude vector does not match register dimensions")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.register)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.register)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ConfigError(f"unknown subsystem {label!r}") from None

    def subsystem(self, label: str) -> Subsystem:
        return self.register[self.index(label)]

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, levels: Mapping[str, int | str]) -> complex:
        """Amplitude of a fully specified basis state."""
        if set(levels) != set(self.labels):
            raise ConfigError(f"basis state must assign every subsystem of {self.labels}")
        idx = tuple(_level(self.subsystem(lab), levels[lab]) for lab in self.labels)
        return complex(self.tensor()[idx])

    def copy(self) -> "QuantumState":
        return QuantumState(self.register, self.amplitudes.copy(), self.leakage)

    def __repr__(self):
        terms = []
        for idx in zip(*np.nonzero(np.abs(self.tensor()) > 1e-12)):
            ket = ",".join(f"{lab}={_level_name(s, i)}" for lab, s, i in zip(self.labels, self.register, idx))
            terms.append(f"{self.tensor()[idx].real:+.6g}|{ket}>")
        return "QuantumState(" + " ".join(terms) + ")"


def _level(sub: Subsystem, level) -> int:
    if isinstance(level, str):
        if sub.kind != "atom" or level not in ATOM_LEVELS:
            raise ConfigError(f"{sub.label}: unknown level {level!r}")
        level = ATOM_LEVELS[level]
    level = int(level)
    if not 0 <= level < sub.dim:
        raise ConfigError(f"{sub.label}: level {level} outside 0..{sub.dim - 1}")
    return level


def _level_name(sub: Subsystem, level: int) -> str:
    if sub.kind == "atom":
        return "e" if level == E else "g"
    return str(level)


def make_state(register: Sequence[Subsystem], basis_assignment: Mapping[str, int | str]) -> QuantumState:
    """Product basis state, e.g. ``make_state([atom("a1"), cavity("C1")], {"a1": "e", "C1": 0})``."""
    register = tuple(register)
    labels = [s.label for s in register]
    unknown = set(basis_assignment) - set(labels)
    if unknown:
        raise ConfigError(f"unknown labels {sorted(unknown)}")
    missing = [lab for lab in labels if lab not in basis_assignment]
    if missing:
        raise ConfigError(f"no level assigned to {missing}")
    dims = tuple(s.dim for s in register)
    amps = np.zeros(math.prod(dims), dtype=complex)
    idx = tuple(_level(s, basis_assignment[s.label]) for s in register)
    amps[np.ravel_multi_index(idx, dims)] = 1.0
    return QuantumState(register, amps)


def from_amplitudes(register: Sequence[Subsystem], coefficients: Mapping[tuple, complex]) -> QuantumState:
    """State from ``{levels_tuple: coefficient}``, normalized. Levels follow register order."""
    register = tuple(register)
    dims = tuple(s.dim for s in register)
    amps = np.zeros(math.prod(dims), dtype=complex)
    for levels, c in coefficients.items():
        idx = tuple(_level(s, lv) for s, lv in zip(register, levels))
        amps[np.ravel_multi_index(idx, dims)] += c
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise ConfigError("all coefficients are zero")
    return QuantumState(register, amps / norm)


def tensor_product(first: QuantumState, second: QuantumState) -> QuantumState:
    return QuantumState(
        first.register + second.register,
        np.kron(first.amplitudes, second.amplitudes),
        first.leakage + second.leakage,
    )


def extend(state: QuantumState, subsystems: Sequence[Subsystem], levels: Mapping[str, int | str]) -> QuantumState:
    """Append fresh subsystems prepared in basis levels."""
    return tensor_product(state, make_state(subsystems, levels))


def _pair_indices(state: QuantumState, first: str, second: str) -> np.ndarray:
    """Flat indices arranged as [level_first, level_second, rest]."""
    i, j = state.index(first), state.index(second)
    idx = np.arange(state.amplitudes.size, dtype=np.int64).reshape(state.dims)
    idx = np.moveaxis(idx, (i, j), (0, 1))
    return idx.reshape(state.dims[i], state.dims[j], -1)


def apply_jc(state: QuantumState, atom: str, cavity: str, theta: float, mode=InteractionMode.REPLICATION) -> QuantumState:
    """Resonant atom-cavity transit with pulse area ``theta``.

    Each active pair maps ``|e,n> -> c|e,n> + s|g,n+1>`` and
    ``|g,n+1> -> -s|e,n> + c|g,n+1>`` with ``(c, s) = (cos, sin)`` of the
    pair angle. Only ``n = 0`` is active in replication mode.
    """
    mode = InteractionMode.parse(mode)
    a_sub, c_sub = state.subsystem(atom), state.subsystem(cavity)
    if a_sub.kind != "atom" or c_sub.kind != "cavity":
        raise ConfigError(f"apply_jc needs (atom, cavity), got ({a_sub.kind}, {c_sub.kind})")
    idx = _pair_indices(state, atom, cavity)
    top = c_sub.cutoff
    photon_numbers = [0] if mode is InteractionMode.REPLICATION else range(top)
    ia = np.concatenate([idx[E, n] for n in photon_numbers])
    ib = np.concatenate([idx[G, n + 1] for n in photon_numbers])
    angles = np.concatenate(
        [np.full(idx.shape[2], theta * (1.0 if mode is InteractionMode.REPLICATION else math.sqrt(n + 1))) for n in photon_numbers]
    )
    out = state.amplitudes.copy()
    _kernels.rotate_pairs(out, ia, ib, np.cos(angles), np.sin(angles))

    leakage = state.leakage
    if mode is InteractionMode.EXACT:
        stranded = float(np.linalg.norm(out[idx[E, top]]))
        if stranded > LEAKAGE_THRESHOLD and theta != 0:
            leakage = leakage + (LeakageRecord(atom, cavity, stranded),)
    return QuantumState(state.register, out, leakage)


_RAMSEY_ANGLE = -math.pi / 4


def apply_ramsey(state: QuantumState, atom: str) -> QuantumState:
    """pi/2 pulse: ``|e> -> (|e> - |g>)/sqrt2``, ``|g> -> (|e> + |g>)/sqrt2``."""
    if state.subsystem(atom).kind != "atom":
        raise ConfigError(f"{atom} is not an atom")
    i = state.index(atom)
    flat = np.moveaxis(np.arange(state.amplitudes.size, dtype=np.int64).reshape(state.dims), i, 0).reshape(2, -1)
    ia, ib = np.ascontiguousarray(flat[E]), np.ascontiguousarray(flat[G])
    m = ia.size
    out = state.amplitudes.copy()
    _kernels.rotate_pairs(out, ia, ib, np.full(m, math.cos(_RAMSEY_ANGLE)), np.full(m, math.sin(_RAMSEY_ANGLE)))
    return QuantumState(state.register, out, state.leakage)


def joint_distribution(state: QuantumState, labels: Sequence[str]) -> np.ndarray:
    """Born probabilities over the listed subsystems, axes in the given order."""
    positions = [state.index(lab) for lab in labels]
    probs = np.abs(state.tensor()) ** 2
    others = tuple(i for i in range(len(state.dims)) if i not in positions)
    marg = probs.sum(axis=others)
    # summing keeps remaining axes in register order; permute to requested order
    kept = sorted(positions)
    return np.transpose(marg, [kept.index(p) for p in positions])


def outcome_distribution(state: QuantumState, subsystem: str) -> dict[int, float]:
    """Marginal level probabilities of one subsystem."""
    marg = joint_distribution(state, [subsystem])
    return {level: float(p) for level, p in enumerate(marg)}


def project(state: QuantumState, subsystem: str, levels) -> tuple[float, QuantumState]:
    """Project onto a set of levels of one subsystem and renormalize."""
    sub = state.subsystem(subsystem)
    if isinstance(levels, (int, str)):
        levels = [levels]
    keep = sorted({_level(sub, lv) for lv in levels})
    i = state.index(subsystem)
    t = np.moveaxis(state.tensor().copy(), i, 0)
    mask = np.zeros(sub.dim, dtype=bool)
    mask[keep] = True
    t[~mask] = 0
    amps = np.moveaxis(t, 0, i).reshape(-1)
    p = float(np.vdot(amps, amps).real)
    if p < IMPOSSIBLE_THRESHOLD:
        raise ImpossibleOutcome(f"{subsystem} in {keep} has probability {p:.3g}")
    return p, QuantumState(state.register, amps / math.sqrt(p), state.leakage)


def collapse(state: QuantumState, subsystem: str, outcome) -> tuple[float, QuantumState]:
    """Measure one subsystem, post-select ``outcome``; returns (probability, state)."""
    return project(state, subsystem, [outcome])


def discard(state: QuantumState, subsystem: str) -> QuantumState:
    """Remove a subsystem that is in a definite basis level (e.g. after collapse)."""
    i = state.index(subsystem)
    marg = joint_distribution(state, [subsystem])
    level = int(np.argmax(marg))
    if abs(marg[level] - 1.0) > 1e-12:
        raise ConfigError(f"{subsystem} is not in a definite level; cannot discard")
    t = np.take(state.tensor(), level, axis=i)
    amps = np.ascontiguousarray(t).reshape(-1)
    register = state.register[:i] + state.register[i + 1 :]
    return QuantumState(register, amps / np.linalg.norm(amps), state.leakage)
