"""UCB acquisition and its maximisation over boxes and finite tables."""
from dataclasses import dataclass, field

import numpy as np

from .errors import ExhaustedDomainError, InputError

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Box:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float).reshape(-1)
        hi = np.asarray(self.upper, dtype=float).reshape(-1)
        if lo.shape != hi.shape or not np.all(lo < hi):
            raise InputError("Box needs lower < upper in every coordinate")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self):
        return self.lower.size

    @classmethod
    def unit(cls, d):
        return cls(np.zeros(d), np.ones(d))

    def contains(self, x, tol=0.0):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def sample(self, rng, n):
        return self.lower + (self.upper - self.lower) * rng.random((n, self.dim))


@dataclass
class Discrete:
    """Finite candidate table; ``queried`` holds row indices already observed."""

    points: np.ndarray
    queried: set = field(default_factory=set)
    allow_requery: bool = False

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if len(self.points) == 0:
            raise InputError("Discrete domain needs at least one point")

    @property
    def dim(self):
        return self.points.shape[1]

    def admissible(self):
        idx = np.arange(len(self.points))
        if self.allow_requery:
            return idx
        return np.array([i for i in idx if i not in self.queried], dtype=int)

    def fresh(self):
        return Discrete(self.points, set(), self.allow_requery)


@dataclass(frozen=True)
class MaximizerBudget:
    samples_per_dim: int = 1024
    refine_evals: int = 64
    starts: int = 4


@dataclass(frozen=True)
class Proposal:
    x: np.ndarray
    value: float
    index: int = -1


def ucb(model, beta, X):
    mu, var = model.predict(X)
    return mu + beta * np.sqrt(var)


def ucb_value(model, beta, x):
    if beta < 0:
        raise InputError("beta must be non-negative")
    return float(ucb(model, beta, np.asarray(x, dtype=float).reshape(1, -1))[0])


def _golden_coordinate(f, X, vals, j, lo, hi, evals):
    """Golden-section search along coordinate j for every row of X at once.

    Rows only move when the search finds a strictly better value.
    """
    a, b = lo.copy(), hi.copy()
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    best_X, best_v = X.copy(), vals.copy()

    def probe(z):
        P = best_X.copy()
        P[:, j] = z
        fv = f(P)
        better = fv > best_v
        best_X[better], best_v[better] = P[better], fv[better]
        return fv

    # best_X only changes along j, so every probe shares the other coordinates
    fc = probe(c)
    fd = probe(d)
    for _ in range(max(evals - 2, 0)):
        left = fc > fd
        a, b = np.where(left, a, c), np.where(left, d, b)
        c_new = np.where(left, b - GOLDEN * (b - a), d)
        d_new = np.where(left, c, a + GOLDEN * (b - a))
        fp = probe(np.where(left, c_new, d_new))
        fc, fd = np.where(left, fp, fd), np.where(left, fc, fp)
        c, d = c_new, d_new
    return best_X, best_v


def _maximize_box(model, beta, box, budget, rng, incumbent):
    d = box.dim

    def f(P):
        return ucb(model, beta, P)

    m = budget.samples_per_dim * d
    X = box.sample(rng, m)
    if incumbent is not None:
        X = np.vstack([X, np.asarray(incumbent, dtype=float).reshape(1, d)])
    vals = f(X)
    order = np.argsort(-vals, kind="stable")[: budget.starts]
    S, sv = X[order].copy(), vals[order].copy()
    if budget.refine_evals > 0:
        width = box.upper - box.lower
        half = np.minimum(0.25, 4.0 * m ** (-1.0 / d)) * width
        for j in range(d):
            lo = np.maximum(S[:, j] - half[j], box.lower[j])
            hi = np.minimum(S[:, j] + half[j], box.upper[j])
            S, sv = _golden_coordinate(f, S, sv, j, lo, hi, budget.refine_evals)
    k = int(np.argmax(sv))
    return Proposal(np.clip(S[k], box.lower, box.upper), float(sv[k]))


def maximize_ucb(model, beta, domain, budget=MaximizerBudget(), seed=0, incumbent=None):
    """Approximate argmax of the UCB surface over the domain.

    Boxes use uniform sampling plus coordinate-wise golden-section refinement
    of the best starts; tables use an exact argmax over admissible rows (ties
    go to the lowest index).
    """
    if isinstance(domain, Discrete):
        idx = domain.admissible()
        if idx.size == 0:
            raise ExhaustedDomainError("every table row has been queried")
        vals = ucb(model, beta, domain.points[idx])
        k = int(np.argmax(vals))
        return Proposal(domain.points[idx[k]].copy(), float(vals[k]), int(idx[k]))
    rng = np.random.default_rng(seed)
    return _maximize_box(model, beta, domain, budget, rng, incumbent)
