"""Hardy chain from the four experiment records, verdict, and LHV enumeration."""

from __future__ import annotations

import enum
import itertools
from dataclasses import asdict, dataclass
from typing import Iterable, Mapping

from .errors import ConfigError
from .protocols import ExperimentRecord, Setting

DEFAULT_EPS = 0.01

ALICE_DIRECT = ("photon", "none")
ALICE_AUX = ("C1", "C4", "none")
BOB_DIRECT = ("photon", "none")
BOB_AUX = ("C2", "C3", "none")

ALL_CONSTRAINTS = frozenset({"i", "ii", "iii", "iv"})


@dataclass(frozen=True)
class HardyStats:
    p_joint_direct: float
    p_e2_event: float
    c_alice_given_e2: float
    p_e3_event: float
    c_bob_given_e3: float
    p4_joint: float

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not -1e-12 <= value <= 1 + 1e-12:
                raise ConfigError(f"{name} = {value} is not a probability")


class Verdict(enum.Enum):
    CONTRADICTS_LOCALITY = "ContradictsLocality"
    INCONCLUSIVE = "Inconclusive"


def hardy_stats(records: Mapping[int, ExperimentRecord] | Iterable[ExperimentRecord]) -> HardyStats:
    """Collect the chain quantities from experiments 1-4 (one mode, one parameter set)."""
    if not isinstance(records, Mapping):
        records = {r.experiment_id: r for r in records}
    missing = [eid for eid in (1, 2, 3, 4) if eid not in records]
    if missing:
        raise ConfigError(f"missing experiment records: {missing}")
    modes = {records[eid].mode for eid in (1, 2, 3, 4)}
    if len(modes) != 1:
        raise ConfigError("records mix interaction modes")
    r1, r2, r3, r4 = (records[eid] for eid in (1, 2, 3, 4))
    for rec, eid in ((r1, 1), (r2, 2), (r3, 3), (r4, 4)):
        if rec.experiment_id != eid:
            raise ConfigError(f"record under key {eid} is experiment {rec.experiment_id}")

    e2 = r2.outcome_probability(bob="C2")
    e3 = r3.outcome_probability(alice="C1")
    # An event that never happens carries no implication; the conditional is then vacuous.
    c2 = r2.outcome_probability("photon", "C2") / e2 if e2 > 0 else 0.0
    c3 = r3.outcome_probability("C1", "photon") / e3 if e3 > 0 else 0.0
    return HardyStats(
        p_joint_direct=r1.outcome_probability("photon", "photon"),
        p_e2_event=e2,
        c_alice_given_e2=c2,
        p_e3_event=e3,
        c_bob_given_e3=c3,
        p4_joint=r4.outcome_probability("C1", "C2"),
    )


def _check_eps(eps: float) -> None:
    if not 0 < eps <= 0.05:
        raise ConfigError(f"eps must lie in (0, 0.05], got {eps}")


def hardy_verdict(stats: HardyStats, eps: float = DEFAULT_EPS) -> Verdict:
    _check_eps(eps)
    holds = (
        stats.p_joint_direct <= eps
        and stats.c_alice_given_e2 >= 1 - eps
        and stats.c_bob_given_e3 >= 1 - eps
        and stats.p4_joint > eps
    )
    return Verdict.CONTRADICTS_LOCALITY if holds else Verdict.INCONCLUSIVE


def constraints_from_stats(stats: HardyStats, eps: float = DEFAULT_EPS) -> frozenset[str]:
    """Which Hardy support constraints the observed statistics license."""
    _check_eps(eps)
    out = set()
    if stats.p_joint_direct <= eps:
        out.add("i")
    if stats.c_alice_given_e2 >= 1 - eps:
        out.add("ii")
    if stats.c_bob_given_e3 >= 1 - eps:
        out.add("iii")
    if stats.p4_joint > eps:
        out.add("iv")
    return frozenset(out)


@dataclass(frozen=True)
class LhvStrategy:
    """Predetermined outcome for each local setting, independent of the remote choice."""

    alice_direct: str
    alice_aux: str
    bob_direct: str
    bob_aux: str

    def outcome(self, party: str, setting: Setting) -> str:
        suffix = "direct" if setting is Setting.DIRECT else "aux"
        return getattr(self, f"{party}_{suffix}")


def all_strategies() -> list[LhvStrategy]:
    return [LhvStrategy(*combo) for combo in itertools.product(ALICE_DIRECT, ALICE_AUX, BOB_DIRECT, BOB_AUX)]


def violations(strategy: LhvStrategy, constraints: Iterable[str] = ALL_CONSTRAINTS) -> list[str]:
    """Constraints the strategy breaks.

    i   directs never both find the photon
    ii  Bob's aux setting yields C2  =>  Alice's direct check finds the photon
    iii Alice's aux setting yields C1  =>  Bob's direct check finds the photon
    iv  the strategy can produce the experiment-4 event (C1, C2)
    """
    s = strategy
    broken = []
    active = set(constraints)
    if "i" in active and s.alice_direct == "photon" and s.bob_direct == "photon":
        broken.append("i")
    if "ii" in active and s.bob_aux == "C2" and s.alice_direct != "photon":
        broken.append("ii")
    if "iii" in active and s.alice_aux == "C1" and s.bob_direct != "photon":
        broken.append("iii")
    if "iv" in active and not (s.alice_aux == "C1" and s.bob_aux == "C2"):
        broken.append("iv")
    return broken


@dataclass(frozen=True)
class LhvResult:
    total_strategies: int
    constraints: frozenset[str]
    satisfying: tuple[LhvStrategy, ...]

    @property
    def satisfiable(self) -> bool:
        return bool(self.satisfying)


def lhv_enumerate(constraints: Iterable[str] = ALL_CONSTRAINTS) -> LhvResult:
    """Test every deterministic local strategy against the chosen constraints.

    Constraints i-iii are zero-probability (support) statements and iv asks for
    positive support, so if no deterministic strategy satisfies all of them, no
    mixture of strategies can either.
    """
    constraints = frozenset(constraints)
    unknown = constraints - ALL_CONSTRAINTS
    if unknown:
        raise ConfigError(f"unknown constraints {sorted(unknown)}")
    strategies = all_strategies()
    satisfying = tuple(s for s in strategies if not violations(s, constraints))
    return LhvResult(len(strategies), constraints, satisfying)
