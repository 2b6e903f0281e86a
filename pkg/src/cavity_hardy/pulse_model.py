"""Atom-cavity coupling profile, pulse area and transit amplitudes.

All quantities are SI: meters, seconds, rad/s. An atom crossing the cavity
at constant velocity ``v`` sees the coupling

    G(t) = omega0 * k * exp(-|v t - b| / R_def) * cos(pi (v t - b) / a_l)

for ``0 <= t <= 2 b / v``. The pulse area ``theta`` is the integral of ``G``
over the full transit, and the transit leaves ``|e,0>`` in
``cos(theta)|e,0> + sin(theta)|g,1>``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy import optimize

from . import _kernels
from .errors import ConfigError, DomainError, NoSolution, NumericalError

# Photonic band-gap cavity constants used throughout.
A_L = 624e-9
R_DEF = 624e-9
B_HALF = 6.24e-6  # 10 R_def
OMEGA0 = 1.1e10

DEFAULT_GEOMETRY = {"a_l": A_L, "R_def": R_DEF, "b": B_HALF, "omega0": OMEGA0}

QUADRATURE_RTOL = 1e-10
QUADRATURE_MAX_INTERVALS = 2**22


@dataclass(frozen=True)
class CouplingParams:
    """Geometry and kinematics of one atom-cavity transit.

    a_l : lattice constant [m]
    R_def : spatial extent of the mode [m]
    omega0 : peak Rabi frequency [rad/s]
    b : half interaction length [m]
    v : atom velocity [m/s]
    k : dipole/field overlap, a direction cosine in [0, 1]
    """

    v: float
    k: float = 1.0
    a_l: float = A_L
    R_def: float = R_DEF
    omega0: float = OMEGA0
    b: float = B_HALF

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ConfigError("invalid CouplingParams: " + "; ".join(problems), problems)

    def problems(self) -> list[str]:
        out = []
        for name in ("a_l", "R_def", "omega0", "b", "v"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                out.append(f"{name} must be a positive finite number, got {value!r}")
        if not (isinstance(self.k, (int, float)) and 0.0 <= self.k <= 1.0):
            out.append(f"k must lie in [0, 1], got {self.k!r}")
        return out

    @classmethod
    def reference(cls, v: float, k: float = 1.0) -> "CouplingParams":
        return cls(v=v, k=k, **DEFAULT_GEOMETRY)

    @property
    def interaction_time(self) -> float:
        """Transit duration 2b/v [s]."""
        return 2.0 * self.b / self.v

    def with_(self, **changes) -> "CouplingParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class Amplitudes:
    """Transit amplitudes ``(alpha1, alpha2) = (cos theta, sin theta)``."""

    theta: float
    alpha1: float
    alpha2: float

    @classmethod
    def from_theta(cls, theta: float) -> "Amplitudes":
        theta = float(theta)
        return cls(theta, math.cos(theta), math.sin(theta))

    @classmethod
    def from_alphas(cls, alpha1: float, alpha2: float) -> "Amplitudes":
        """Force a pair of amplitudes; they must be normalized to 1e-12."""
        if abs(alpha1 * alpha1 + alpha2 * alpha2 - 1.0) > 1e-12:
            raise ConfigError(f"amplitudes ({alpha1}, {alpha2}) are not normalized")
        return cls.from_theta(math.atan2(alpha2, alpha1))


def coupling_profile(params: CouplingParams, t):
    """Coupling G(t) in rad/s for ``0 <= t <= 2b/v``; accepts scalars or arrays."""
    t_arr = np.asarray(t, dtype=float)
    t_end = params.interaction_time
    slack = 1e-12 * t_end
    if np.any(t_arr < -slack) or np.any(t_arr > t_end + slack):
        raise DomainError(f"t must lie in [0, {t_end!r}] s")
    x = params.v * t_arr - params.b
    g = params.omega0 * params.k * np.exp(-np.abs(x) / params.R_def) * np.cos(math.pi * x / params.a_l)
    return float(g) if g.ndim == 0 else g


def pulse_area(params: CouplingParams) -> Amplitudes:
    """Closed-form pulse area of a full transit, with its amplitudes."""
    a, r, b = params.a_l, params.R_def, params.b
    # exp(-b/R) distributed over the bracket to avoid overflow for large b/R.
    decay = math.exp(-b / r)
    bracket = a + decay * (math.pi * r * math.sin(math.pi * b / a) - a * math.cos(math.pi * b / a))
    theta = 2.0 * a * r * params.omega0 * params.k * bracket / (params.v * (a * a + math.pi**2 * r * r))
    return Amplitudes.from_theta(theta)


def pulse_area_quadrature(params: CouplingParams, steps: int = 1000) -> float:
    """Pulse area by composite Simpson on the coupling profile.

    The interval count starts at ``steps`` (rounded up to a multiple of 4 so the
    envelope cusp at t = b/v sits on a panel boundary) and doubles until the
    relative change drops below 1e-10.
    """
    if steps < 1000:
        raise ConfigError(f"steps must be >= 1000, got {steps}")
    if params.k == 0:
        return 0.0
    n = -(-steps // 4) * 4
    args = (params.v, params.b, 1.0 / params.R_def, math.pi / params.a_l, params.interaction_time)
    prev = _kernels.simpson_profile_sum(*args, n)
    while n * 2 <= QUADRATURE_MAX_INTERVALS:
        n *= 2
        cur = _kernels.simpson_profile_sum(*args, n)
        if abs(cur - prev) <= QUADRATURE_RTOL * abs(cur):
            return params.omega0 * params.k * cur
        prev = cur
    raise NumericalError(f"Simpson quadrature did not converge within {QUADRATURE_MAX_INTERVALS} intervals")


class AmplitudeCondition(enum.Enum):
    ALPHA1_ZERO = "alpha1_zero"
    ALPHA_EQUAL = "alpha_equal"
    ALPHA1_SQRT2_ALPHA2 = "alpha1_sqrt2_alpha2"
    TAN_MINUS_ONE = "tan_minus_one"
    ALPHA1_ONE = "alpha1_one"

    @classmethod
    def parse(cls, name) -> "AmplitudeCondition":
        if isinstance(name, cls):
            return name
        key = str(name).replace("-", "_").lower()
        aliases = {"alpha1_sqrt2": cls.ALPHA1_SQRT2_ALPHA2}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ConfigError(f"unknown amplitude condition {name!r}") from None

    def residual(self, amps: Amplitudes) -> float:
        """Signed deviation from the condition, zero when it holds."""
        a1, a2 = amps.alpha1, amps.alpha2
        if self is AmplitudeCondition.ALPHA1_ZERO:
            return a1
        if self is AmplitudeCondition.ALPHA_EQUAL:
            return a1 - a2
        if self is AmplitudeCondition.ALPHA1_SQRT2_ALPHA2:
            return a1 - math.sqrt(2.0) * a2
        if self is AmplitudeCondition.TAN_MINUS_ONE:
            return a1 + a2
        return 1.0 - a1

    def _bracket_function(self, theta: float) -> float:
        # alpha1 = 1 is a double root of 1 - cos; sin(theta) crosses zero there instead.
        if self is AmplitudeCondition.ALPHA1_ONE:
            return math.sin(theta)
        return self.residual(Amplitudes.from_theta(theta))


class FreeParameter(enum.Enum):
    VELOCITY = "v"
    OVERLAP = "k"

    @classmethod
    def parse(cls, name) -> "FreeParameter":
        if isinstance(name, cls):
            return name
        key = {"velocity": "v", "overlap": "k"}.get(str(name).lower(), str(name).lower())
        try:
            return cls(key)
        except ValueError:
            raise ConfigError(f"free parameter must be 'v' or 'k', got {name!r}") from None


@dataclass(frozen=True)
class Solution:
    value: float
    params: CouplingParams
    amplitudes: Amplitudes
    residual: float


def _scan_points(free: FreeParameter, fixed: CouplingParams, lo: float, hi: float) -> np.ndarray:
    # theta is monotone in both v (as 1/v) and k (linear): bound the steepest slope.
    if free is FreeParameter.VELOCITY:
        slope = abs(pulse_area(fixed.with_(v=lo)).theta) / lo
    else:
        slope = abs(pulse_area(fixed.with_(k=1.0)).theta)
    max_step = (math.pi / 16) / slope if slope > 0 else hi - lo
    n = max(16, math.ceil((hi - lo) / max_step))
    return np.linspace(lo, hi, n + 1)


def solve_parameter(
    target,
    free,
    fixed: CouplingParams,
    search_range: Sequence[float],
    seed: float | None = None,
) -> list[Solution]:
    """Every value of the free parameter in ``search_range`` meeting ``target``.

    The range is scanned on a grid fine enough that theta moves less than
    pi/8 per step; each sign change is refined by bisection. Roots are sorted
    ascending, or by distance to ``seed`` when one is given.
    """
    target = AmplitudeCondition.parse(target)
    free = FreeParameter.parse(free)
    lo, hi = (float(x) for x in search_range)
    if not lo < hi:
        raise NoSolution(f"empty search range [{lo}, {hi}]")
    if free is FreeParameter.VELOCITY and lo <= 0:
        raise ConfigError("velocity range must be positive")
    if free is FreeParameter.OVERLAP and (lo < 0 or hi > 1):
        raise ConfigError("overlap range must lie within [0, 1]")

    def theta_at(x: float) -> float:
        return pulse_area(fixed.with_(**{free.value: x})).theta

    def f(x: float) -> float:
        return target._bracket_function(theta_at(x))

    def admissible(x: float) -> bool:
        if target is AmplitudeCondition.ALPHA1_ONE:
            return math.cos(theta_at(x)) > 0
        return True

    grid = _scan_points(free, fixed, lo, hi)
    values = [f(x) for x in grid]
    roots = []
    for i in range(len(grid) - 1):
        x0, x1, f0, f1 = grid[i], grid[i + 1], values[i], values[i + 1]
        if f0 == 0.0:
            candidate = x0
        elif f0 * f1 < 0:
            candidate = optimize.bisect(f, x0, x1, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=400)
        else:
            continue
        if admissible(candidate):
            roots.append(candidate)
    if values[-1] == 0.0 and admissible(grid[-1]):
        roots.append(grid[-1])

    solutions = []
    for x in roots:
        params = fixed.with_(**{free.value: float(x)})
        amps = pulse_area(params)
        if abs(target._bracket_function(amps.theta)) >= 1e-10:
            raise NumericalError(f"bisection stalled at {x!r} with residual {target._bracket_function(amps.theta)!r}")
        solutions.append(Solution(float(x), params, amps, target.residual(amps)))
    if not solutions:
        raise NoSolution(f"no {target.value} root for {free.value} in [{lo}, {hi}]")
    if seed is not None:
        solutions.sort(key=lambda s: (abs(s.value - seed), s.value))
    return solutions
