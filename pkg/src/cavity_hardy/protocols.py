"""State preparation and the four Alice/Bob experiments as quantum_core scripts.

Labels: Alice owns cavity C1 and auxiliary C4 with atom a3; Bob owns C2 and
auxiliary C3 with atom a2. Atom a1 prepares the photon across C1 and C2.
Direct checks use ground-state probe atoms pA (on C1) and pB (on C2).

Transit keys name ``<atom>_<cavity>``: a1_C1, a1_C2, a2_C3, a2_C2, a3_C4,
a3_C1, probe_C1, probe_C2. A transit is given either as
:class:`CouplingParams` or as forced :class:`Amplitudes`.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from . import quantum_core as qc
from .errors import ConfigError, DegenerateState, ImpossibleOutcome, UndefinedConditional
from .pulse_model import Amplitudes, CouplingParams, pulse_area
from .quantum_core import E, G, InteractionMode, QuantumState

Transit = Union[CouplingParams, Amplitudes]

TRANSIT_KEYS = ("a1_C1", "a1_C2", "a2_C3", "a2_C2", "a3_C4", "a3_C1", "probe_C1", "probe_C2")

PROBE_ALPHA1_LIMIT = 0.01
CONDITIONING_FLOOR = 1e-12


def reference_transits() -> dict[str, CouplingParams]:
    """Reference operating point: velocities and overlaps; auxiliary overlaps at 0.8."""
    return {
        "a1_C1": CouplingParams.reference(179.0, 0.979),
        "a1_C2": CouplingParams.reference(179.0, 1.0),
        "a2_C3": CouplingParams.reference(161.0, 0.8),
        "a2_C2": CouplingParams.reference(161.0, 1.0),
        "a3_C4": CouplingParams.reference(161.0, 0.8),
        "a3_C1": CouplingParams.reference(161.0, 1.0),
        "probe_C1": CouplingParams.reference(161.0, 1.0),
        "probe_C2": CouplingParams.reference(161.0, 1.0),
    }


def idealized_transits() -> dict[str, Amplitudes]:
    """Amplitudes the quoted parameters approximate, forced exactly."""
    r = 1.0 / math.sqrt(2.0)
    swap = Amplitudes.from_theta(math.pi / 2)
    idle = Amplitudes.from_theta(0.0)
    return {
        "a1_C1": Amplitudes.from_alphas(math.sqrt(2.0 / 3.0), math.sqrt(1.0 / 3.0)),
        "a1_C2": Amplitudes.from_alphas(r, r),
        "a2_C3": idle,
        "a2_C2": swap,
        "a3_C4": idle,
        "a3_C1": swap,
        "probe_C1": swap,
        "probe_C2": swap,
    }


def transit_amplitudes(transit: Transit) -> Amplitudes:
    if isinstance(transit, Amplitudes):
        return transit
    if isinstance(transit, CouplingParams):
        return pulse_area(transit)
    raise ConfigError(f"transit must be CouplingParams or Amplitudes, got {type(transit).__name__}")


def _theta(transit: Transit) -> float:
    return transit_amplitudes(transit).theta


def _pair(x) -> tuple[float, float]:
    if isinstance(x, (Amplitudes, CouplingParams)):
        amps = transit_amplitudes(x)
        return amps.alpha1, amps.alpha2
    a1, a2 = (float(v) for v in x)
    if abs(a1 * a1 + a2 * a2 - 1.0) > 1e-10:
        raise ConfigError(f"amplitude pair ({a1}, {a2}) is not normalized")
    return a1, a2


class Setting(enum.Enum):
    DIRECT = "direct"
    AUXILIARY = "auxiliary"


EXPERIMENT_SETTINGS = {
    1: (Setting.DIRECT, Setting.DIRECT),
    2: (Setting.DIRECT, Setting.AUXILIARY),
    3: (Setting.AUXILIARY, Setting.DIRECT),
    4: (Setting.AUXILIARY, Setting.AUXILIARY),
}


@dataclass(frozen=True)
class ExperimentConfig:
    mode: InteractionMode = InteractionMode.REPLICATION
    alice_setting: Setting = Setting.DIRECT
    bob_setting: Setting = Setting.DIRECT
    transits: Mapping[str, Transit] = field(default_factory=reference_transits)
    detection_branch: Mapping[str, str] = field(default_factory=lambda: {"a2": "e", "a3": "e"})
    direct_path: str = "probe"
    cutoff: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", InteractionMode.parse(self.mode))
        problems = []
        missing = [key for key in TRANSIT_KEYS if key not in self.transits]
        if missing:
            problems.append(f"missing transits: {missing}")
        for atom_label in ("a2", "a3"):
            if self.detection_branch.get(atom_label, "e") not in ("e", "g"):
                problems.append(f"detection branch of {atom_label} must be 'e' or 'g'")
        if self.direct_path not in ("probe", "fock"):
            problems.append("direct_path must be 'probe' or 'fock'")
        if self.cutoff is not None and self.cutoff < 1:
            problems.append("cutoff must be >= 1")
        if problems:
            raise ConfigError("; ".join(problems), problems)

    @classmethod
    def for_experiment(cls, experiment_id: int, **kwargs) -> "ExperimentConfig":
        if experiment_id not in EXPERIMENT_SETTINGS:
            raise ConfigError(f"experiment must be 1-4, got {experiment_id}")
        alice, bob = EXPERIMENT_SETTINGS[experiment_id]
        return cls(alice_setting=alice, bob_setting=bob, **kwargs)

    @property
    def experiment_id(self) -> int:
        for eid, settings in EXPERIMENT_SETTINGS.items():
            if settings == (self.alice_setting, self.bob_setting):
                return eid
        raise AssertionError("unreachable")

    @property
    def fock_cutoff(self) -> int:
        return self.cutoff if self.cutoff is not None else self.mode.default_cutoff

    def branch(self, atom_label: str) -> str:
        return self.detection_branch.get(atom_label, "e")


def prepare_state(atom1_c1: Transit, atom1_c2: Transit, mode=InteractionMode.REPLICATION, cutoff: int | None = None):
    """Single photon shared by C1 and C2, heralded by atom a1 found in |g>.

    Returns ``(success_probability, state over C1 (x) C2)``.
    """
    mode = InteractionMode.parse(mode)
    cutoff = mode.default_cutoff if cutoff is None else cutoff
    state = qc.make_state([qc.atom("a1"), qc.cavity("C1", cutoff), qc.cavity("C2", cutoff)], {"a1": "e", "C1": 0, "C2": 0})
    state = qc.apply_jc(state, "a1", "C1", _theta(atom1_c1), mode)
    state = qc.apply_jc(state, "a1", "C2", _theta(atom1_c2), mode)
    state = qc.apply_ramsey(state, "a1")
    p, state = qc.collapse(state, "a1", "g")
    return p, qc.discard(state, "a1")


@dataclass(frozen=True)
class CheckBranch:
    outcome: str
    probability: float
    state: QuantumState


def _validate_probe(probe: Transit) -> None:
    a1 = transit_amplitudes(probe).alpha1
    if abs(a1) >= PROBE_ALPHA1_LIMIT:
        raise ConfigError(f"probe transit must give |alpha1| < {PROBE_ALPHA1_LIMIT}, got {a1:.4g}")


def direct_check(state: QuantumState, party_cavity: str, probe_params: Transit, mode=InteractionMode.REPLICATION,
                 path: str = "probe", probe_label: str | None = None) -> list[CheckBranch]:
    """Ask whether ``party_cavity`` holds a photon; one branch per possible answer.

    ``path="probe"`` sends a ground-state atom through the cavity and reads
    it (excited means photon). ``path="fock"`` measures the photon number.
    """
    mode = InteractionMode.parse(mode)
    cav = state.subsystem(party_cavity)
    if cav.kind != "cavity":
        raise ConfigError(f"{party_cavity} is not a cavity")
    if path == "probe":
        _validate_probe(probe_params)
        label = probe_label or f"probe_{party_cavity}"
        st = qc.extend(state, [qc.atom(label)], {label: "g"})
        st = qc.apply_jc(st, label, party_cavity, _theta(probe_params), mode)
        candidates = [("photon", label, [E]), ("none", label, [G])]
    elif path == "fock":
        st = state
        candidates = [("photon", party_cavity, list(range(1, cav.dim))), ("none", party_cavity, [0])]
    else:
        raise ConfigError(f"path must be 'probe' or 'fock', got {path!r}")
    branches = []
    for outcome, label, levels in candidates:
        try:
            p, post = qc.project(st, label, levels)
        except ImpossibleOutcome:
            continue
        branches.append(CheckBranch(outcome, p, post))
    return branches


@dataclass(frozen=True)
class AuxCheckResult:
    branch_probability: float
    state: QuantumState
    outcome_probabilities: dict[str, float]


def auxiliary_check(state: QuantumState, own_cavity: str, aux_cavity: str, atom_params_aux: Transit,
                    atom_params_own: Transit, detection_branch: str = "e", mode=InteractionMode.REPLICATION,
                    atom_label: str | None = None) -> AuxCheckResult:
    """Excited atom through ``aux_cavity`` then ``own_cavity``, pi/2 pulse, post-select.

    The returned state is conditioned on the atom being found in
    ``detection_branch`` and has the atom removed. Outcome probabilities
    (``own``, ``aux``, ``none``) are for a photon-number readout of the two
    cavities on that conditional state.
    """
    mode = InteractionMode.parse(mode)
    own = state.subsystem(own_cavity)
    if aux_cavity in state.labels:
        if qc.outcome_distribution(state, aux_cavity)[0] < 1 - 1e-12:
            raise ConfigError(f"auxiliary cavity {aux_cavity} must start empty")
        st = state
    else:
        st = qc.extend(state, [qc.cavity(aux_cavity, own.cutoff)], {aux_cavity: 0})
    label = atom_label or f"atom_{own_cavity}"
    st = qc.extend(st, [qc.atom(label)], {label: "e"})
    st = qc.apply_jc(st, label, aux_cavity, _theta(atom_params_aux), mode)
    st = qc.apply_jc(st, label, own_cavity, _theta(atom_params_own), mode)
    st = qc.apply_ramsey(st, label)
    p, st = qc.collapse(st, label, detection_branch)
    st = qc.discard(st, label)
    table = qc.joint_distribution(st, [own_cavity, aux_cavity])
    outcomes = {"own": float(table[1:, 0].sum()), "aux": float(table[0, 1:].sum())}
    outcomes["none"] = float(table.sum()) - outcomes["own"] - outcomes["aux"]
    return AuxCheckResult(p, st, outcomes)


@dataclass(frozen=True)
class AnalyticState:
    """Closed-form conditional state: basis tuple -> coefficient, plus its normalization."""

    coefficients: dict[tuple[int, int], float]
    normalization: float


def analytic_prepared_state(a11, a12) -> dict[tuple[int, int], float]:
    """Heralded C1 (x) C2 state; keys are (n_C1, n_C2)."""
    a11_1, a11_2 = _pair(a11)
    a12_1, a12_2 = _pair(a12)
    return {(0, 0): -a11_1 * a12_1, (1, 0): a11_2, (0, 1): a11_1 * a12_2}


def _norm(denominator: float, what: str) -> float:
    if denominator <= 1e-15:
        raise DegenerateState(f"{what} normalization denominator {denominator:.3g} is not positive")
    return 1.0 / math.sqrt(denominator)


def analytic_bob_conditional(a12, a23, branch: str = "e") -> AnalyticState:
    """Bob's C2 (x) C3 state given Alice found no photon and a2 found in ``branch``.

    Assumes the a2 transit through C2 is a perfect swap. Keys are (n_C2, n_C3).
    """
    p1, p2 = _pair(a12)
    q1, q2 = _pair(a23)
    if branch == "e":
        n1 = _norm(1.0 - 2.0 * p2 * p1 * (q1 * q1 - q2 * q2), "e-branch")
        coeffs = {(1, 0): n1 * (-p1 * q1 + p2 * q1), (0, 1): -n1 * (p1 * q2 + p2 * q2)}
    elif branch == "g":
        n1 = _norm(1.0 + 2.0 * p1 * p2 * (q1 * q1 - q2 * q2), "g-branch")
        coeffs = {(1, 0): -n1 * q1 * (p1 + p2), (0, 1): n1 * q2 * (p2 - p1)}
    else:
        raise ConfigError(f"branch must be 'e' or 'g', got {branch!r}")
    return AnalyticState(coeffs, n1)


def analytic_alice_conditional(a11, a12, a34) -> AnalyticState:
    """Alice's C4 (x) C1 state given Bob found no photon and a3 found in |e>.

    Assumes the a3 transit through C1 is a perfect swap. Keys are (n_C4, n_C1).
    The normalization holds for any a12; see :func:`alice_norm_balanced` for the
    special case a12 = (1/sqrt2, 1/sqrt2).
    """
    a1, a2 = _pair(a11)
    p1, _ = _pair(a12)
    r1, r2 = _pair(a34)
    norm = _norm(a1 * a1 * p1 * p1 + a2 * a2 - 2.0 * a1 * p1 * a2 * (r1 * r1 - r2 * r2), "experiment-3")
    coeffs = {
        (0, 1): norm * (-a1 * p1 * r1 + r1 * a2),
        (1, 0): -norm * (a1 * p1 * r2 + r2 * a2),
    }
    return AnalyticState(coeffs, norm)


def alice_norm_balanced(a11, a34) -> float:
    """Experiment-3 normalization with alpha1(t12) = 1/sqrt2 already substituted."""
    a1, a2 = _pair(a11)
    r1, r2 = _pair(a34)
    return _norm(a1 * a1 / 2 + a2 * a2 - math.sqrt(2.0) * a1 * a2 * (r1 * r1 - r2 * r2), "balanced experiment-3")


@dataclass
class ExperimentRecord:
    experiment_id: int
    mode: InteractionMode
    alice_setting: Setting
    bob_setting: Setting
    preparation_probability: float
    measured: tuple[str, ...]
    joint_table: dict[tuple[int, ...], float]
    outcomes: dict[tuple[str, str], float]
    postselection: dict[str, float]
    events: dict[str, float | None]
    multi_photon: dict[str, float]
    leakage: tuple[qc.LeakageRecord, ...]

    def outcome_probability(self, alice=None, bob=None) -> float:
        return float(sum(p for (a, b), p in self.outcomes.items() if alice in (None, a) and bob in (None, b)))


def _ratio(num: float, den: float) -> float | None:
    return num / den if den >= CONDITIONING_FLOOR else None


def run_experiment(config: ExperimentConfig) -> ExperimentRecord:
    """Prepare the photon, run both parties' settings, tabulate every outcome."""
    mode, cutoff, tr = config.mode, config.fock_cutoff, config.transits
    p_prep, psi = prepare_state(tr["a1_C1"], tr["a1_C2"], mode, cutoff)

    state = qc.extend(
        psi,
        [qc.cavity("C4", cutoff), qc.atom("a3"), qc.cavity("C3", cutoff), qc.atom("a2")],
        {"C4": 0, "a3": "e", "C3": 0, "a2": "e"},
    )
    probe = config.direct_path == "probe"
    sides = (
        ("A", config.alice_setting, "C1", "C4", "a3", "pA", "probe_C1", "a3_C4", "a3_C1"),
        ("B", config.bob_setting, "C2", "C3", "a2", "pB", "probe_C2", "a2_C3", "a2_C2"),
    )
    measured: list[list[str]] = []
    for _, setting, own, aux, atom_label, probe_label, probe_key, aux_key, own_key in sides:
        if setting is Setting.DIRECT:
            if probe:
                _validate_probe(tr[probe_key])
                state = qc.extend(state, [qc.atom(probe_label)], {probe_label: "g"})
                state = qc.apply_jc(state, probe_label, own, _theta(tr[probe_key]), mode)
                measured.append([probe_label])
            else:
                measured.append([own])
        else:
            state = qc.apply_jc(state, atom_label, aux, _theta(tr[aux_key]), mode)
            state = qc.apply_jc(state, atom_label, own, _theta(tr[own_key]), mode)
            state = qc.apply_ramsey(state, atom_label)
            measured.append([atom_label, own, aux])

    labels = measured[0] + measured[1]
    table = qc.joint_distribution(state, labels)
    n_alice = len(measured[0])

    def classify(setting: Setting, levels, own: str, aux: str, atom_label: str) -> str:
        if setting is Setting.DIRECT:
            return "photon" if levels[0] >= 1 else "none"
        atom_level, n_own, n_aux = levels
        if atom_level != qc.ATOM_LEVELS[config.branch(atom_label)]:
            return "none"
        if n_own >= 1 and n_aux == 0:
            return own
        if n_aux >= 1 and n_own == 0:
            return aux
        return "none"

    joint_table: dict[tuple[int, ...], float] = {}
    outcomes: dict[tuple[str, str], float] = {}
    for idx in itertools.product(*(range(d) for d in table.shape)):
        p = float(table[idx])
        if p == 0.0:
            continue
        joint_table[idx] = p
        a = classify(config.alice_setting, idx[:n_alice], "C1", "C4", "a3")
        b = classify(config.bob_setting, idx[n_alice:], "C2", "C3", "a2")
        outcomes[(a, b)] = outcomes.get((a, b), 0.0) + p

    postselection = {}
    for setting, atom_label in ((config.alice_setting, "a3"), (config.bob_setting, "a2")):
        if setting is Setting.AUXILIARY:
            postselection[atom_label] = qc.outcome_distribution(state, atom_label)[qc.ATOM_LEVELS[config.branch(atom_label)]]

    multi_photon = {}
    for lab in ("C1", "C2", "C3", "C4"):
        dist = qc.outcome_distribution(state, lab)
        multi_photon[lab] = float(sum(p for n, p in dist.items() if n >= 2))

    record = ExperimentRecord(
        experiment_id=config.experiment_id,
        mode=mode,
        alice_setting=config.alice_setting,
        bob_setting=config.bob_setting,
        preparation_probability=p_prep,
        measured=tuple(labels),
        joint_table=joint_table,
        outcomes=outcomes,
        postselection=postselection,
        events={},
        multi_photon=multi_photon,
        leakage=state.leakage,
    )
    record.events = _events(record, config)
    return record


def _events(rec: ExperimentRecord, config: ExperimentConfig) -> dict[str, float | None]:
    amps = {key: transit_amplitudes(t) for key, t in config.transits.items()}
    ev: dict[str, float | None] = {}
    if rec.alice_setting is Setting.DIRECT:
        ev["alice_photon"] = rec.outcome_probability(alice="photon")
    if rec.bob_setting is Setting.DIRECT:
        ev["bob_photon"] = rec.outcome_probability(bob="photon")
    if rec.experiment_id == 1:
        ev["joint_direct_photon"] = rec.outcome_probability("photon", "photon")
    elif rec.experiment_id == 2:
        e2 = rec.outcome_probability(bob="C2")
        ev["e2_event"] = e2
        ev["alice_photon_and_e2"] = rec.outcome_probability("photon", "C2")
        ev["c_alice_given_e2"] = _ratio(ev["alice_photon_and_e2"], e2)
        ev["reference_e2_expression"] = 1.0 - amps["a1_C1"].alpha1 ** 2 * amps["a2_C3"].alpha2 ** 2
    elif rec.experiment_id == 3:
        e3 = rec.outcome_probability(alice="C1")
        ev["e3_event"] = e3
        ev["bob_photon_and_e3"] = rec.outcome_probability("C1", "photon")
        ev["c_bob_given_e3"] = _ratio(ev["bob_photon_and_e3"], e3)
        ev["reference_e3_expression"] = 1.0 - amps["a3_C4"].alpha2 ** 2 * amps["a1_C1"].alpha1 ** 2
    else:
        ev["p4_joint"] = rec.outcome_probability("C1", "C2")
        ev["reference_p4_expression"] = 0.0847 * amps["a2_C3"].alpha1 ** 2 * amps["a3_C4"].alpha1 ** 2
    return ev


def conditional_implication(record2: ExperimentRecord, record3: ExperimentRecord) -> tuple[float, float]:
    """``(P(Alice photon | Bob: C2 only), P(Bob photon | Alice: C1 only))``."""
    if record2.experiment_id != 2 or record3.experiment_id != 3:
        raise ConfigError("conditional_implication needs records of experiments 2 and 3")
    e2 = record2.outcome_probability(bob="C2")
    e3 = record3.outcome_probability(alice="C1")
    if e2 < CONDITIONING_FLOOR:
        raise UndefinedConditional(f"Bob's C2-only event has probability {e2:.3g}")
    if e3 < CONDITIONING_FLOOR:
        raise UndefinedConditional(f"Alice's C1-only event has probability {e3:.3g}")
    return (
        record2.outcome_probability("photon", "C2") / e2,
        record3.outcome_probability("C1", "photon") / e3,
    )


def run_all(config: ExperimentConfig) -> dict[int, ExperimentRecord]:
    """All four experiments sharing one parameter set."""
    records = {}
    for eid, (alice, bob) in EXPERIMENT_SETTINGS.items():
        cfg = ExperimentConfig(
            mode=config.mode, alice_setting=alice, bob_setting=bob, transits=config.transits,
            detection_branch=config.detection_branch, direct_path=config.direct_path, cutoff=config.cutoff,
        )
        records[eid] = run_experiment(cfg)
    return records


def total_probability(record: ExperimentRecord) -> float:
    return float(np.sum(list(record.joint_table.values())))
