"""Candidate grids for lengthscale and norm, and the growth schedules that
decide when a new candidate is admitted.
"""
import math
import warnings
from dataclasses import dataclass, field

from .errors import InputError

# relative slack for the admission boundary q(l+1) == theta0 / g(t)
_BOUNDARY_RTOL = 1e-12
# candidates never go below theta0 * exp(-FLOOR_EXP) or above B0 * exp(FLOOR_EXP)
FLOOR_EXP = 12


class CandidateFloorWarning(UserWarning):
    pass


@dataclass(frozen=True)
class GrowthFn:
    """g(t) = max(t0, t**a)."""

    t0: float = 1.0
    a: float = 0.5

    def __post_init__(self):
        if self.t0 < 1:
            raise InputError(f"t0 must be >= 1, got {self.t0}")
        if not 0 <= self.a <= 1:
            raise InputError(f"exponent must lie in [0, 1], got {self.a}")

    def __call__(self, t):
        return growth_eval(self, t)


CONSTANT_ONE = GrowthFn(1.0, 0.0)


def growth_eval(g, t):
    if t < 1:
        raise InputError(f"growth functions are defined for t >= 1, got {t}")
    return max(g.t0, float(t) ** g.a)


def default_t0(d, k=5):
    """Smallest t0 for which k shorter lengthscales are admitted at t = 1."""
    if d < 1:
        raise InputError("d must be >= 1")
    return math.exp(k / d)


def q(i, theta0, d):
    """i-th lengthscale candidate theta0 * exp(-i/d)."""
    if i < 0:
        raise InputError("candidate index must be non-negative")
    return theta0 * math.exp(-i / d)


def v(j, N0):
    """j-th norm candidate N0 * exp(j)."""
    if j < 0:
        raise InputError("candidate index must be non-negative")
    return N0 * math.exp(j)


@dataclass(frozen=True)
class CandidateSchedule:
    theta0: float
    N0: float
    dim: int
    g: GrowthFn = field(default_factory=GrowthFn)
    b: GrowthFn = CONSTANT_ONE

    @property
    def theta_floor(self):
        return self.theta0 * math.exp(-FLOOR_EXP)

    @property
    def norm_cap(self):
        return self.N0 * math.exp(FLOOR_EXP)


def should_add_lengthscale(l, t, schedule):
    """True iff the next candidate q(l+1) lies above the lower bound theta0/g(t)."""
    nxt = q(l + 1, schedule.theta0, schedule.dim)
    lower = schedule.theta0 / growth_eval(schedule.g, t)
    admit = nxt >= lower * (1 - _BOUNDARY_RTOL)
    if admit and nxt < schedule.theta_floor * (1 - _BOUNDARY_RTOL):
        warnings.warn(
            f"lengthscale candidates reached the floor {schedule.theta_floor:.3g}",
            CandidateFloorWarning,
            stacklevel=2,
        )
        return False
    return admit


def should_add_norm(j, t, schedule):
    """True iff the next norm candidate v(j+1) lies below N0 * b(t)."""
    nxt = v(j + 1, schedule.N0)
    admit = nxt <= schedule.N0 * growth_eval(schedule.b, t) * (1 + _BOUNDARY_RTOL)
    if admit and nxt > schedule.norm_cap * (1 + _BOUNDARY_RTOL):
        warnings.warn("norm candidates reached the cap", CandidateFloorWarning, stacklevel=2)
        return False
    return admit


def admit_lengthscales(l, t, schedule):
    """Run the admission loop; returns the new counter and the admitted values."""
    added = []
    while should_add_lengthscale(l, t, schedule):
        l += 1
        added.append(q(l, schedule.theta0, schedule.dim))
    return l, added


def admit_norms(j, t, schedule):
    added = []
    while should_add_norm(j, t, schedule):
        j += 1
        added.append(v(j, schedule.N0))
    return j, added


def max_lengthscale_count(T, schedule):
    """1 + ceil(d ln g(T)): cap on lengthscales introduced up to T."""
    return 1 + math.ceil(schedule.dim * math.log(growth_eval(schedule.g, T)))


def max_norm_count(T, schedule):
    return 1 + math.ceil(math.log(growth_eval(schedule.b, T)))
