"""Regret balancing with elimination over GP-UCB base learners.

Three modes share one implementation:

``"LB"``
    lengthscale candidates q(0), q(1), ... admitted as theta0 / g(t) shrinks,
    all with the same norm parameter N.
``"LNB"``
    the product grid of lengthscale candidates and norm candidates
    v(0), v(1), ... (the latter admitted as N0 * b(t) grows).
``"HB"``
    a fixed list of (theta, N) pairs, nothing admitted.

Every candidate conditions on the same shared data; selecting a candidate
only decides which lengthscale and norm bound the next GP-UCB step uses.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from . import bounds, candidates as cands
from .errors import InputError, InvariantViolation
from .loop import BOLoop, Choice, Policy

LB, LNB, HB = "LB", "LNB", "HB"
ASSERT_TOL = 1e-9


@dataclass
class HyperCandidate:
    theta: float
    N: float
    B: float
    introduced_at: int
    plays: list = field(default_factory=list)
    sum_y: float = 0.0
    sum_beta_sigma: float = 0.0
    active: bool = True
    eliminated_at: int = None
    _curve: np.ndarray = field(default=None, repr=False)
    clamped_increments: int = 0

    @property
    def key(self):
        return (self.theta, self.N)

    @property
    def n(self):
        return len(self.plays)

    def bound(self, cfg, n):
        """Suspected regret bound after n plays (cached and extended on demand)."""
        if self._curve is None or n >= len(self._curve):
            size = max(64, 2 * (n + 1))
            self._curve, self.clamped_increments = bounds.regret_curve(cfg, self.theta, size, self.B)
        return float(self._curve[n])


def l_stat(candidate, t, xi_t):
    """Mean reward minus the noise width sqrt(xi_t / |S|)."""
    n = candidate.n
    if n == 0:
        raise InputError("l_stat needs at least one play")
    return candidate.sum_y / n - math.sqrt(xi_t / n)


class Balancer(Policy):
    """Selection, elimination and admission of candidates.

    ``theta_star`` (and ``N_star`` in LNB mode) switch on the
    checks that need the true hyperparameters; the checks that do not need
    them always run while ``check_invariants`` is set.
    """

    def __init__(self, cfg, schedule=None, mode=LB, fixed=None, theta_star=None,
                 N_star=None, check_invariants=True, xi_variant="running"):
        super().__init__(cfg)
        if mode not in (LB, LNB, HB):
            raise InputError(f"unknown balancer mode {mode!r}")
        self.mode = mode
        self.name = {LB: "LB", LNB: "LNB", HB: "HB"}[mode]
        self.schedule = schedule or cands.CandidateSchedule(cfg.theta0, cfg.N, cfg.dim)
        self.theta_star = theta_star
        self.N_star = N_star
        self.check_invariants = check_invariants
        self.xi_variant = xi_variant
        self.candidates = []
        self.l = 0
        self.j = 0
        self.thetas = []
        self.norms = []
        self.history = []
        self.balance_checks = 0  # balancing comparisons actually made
        if mode == HB:
            if not fixed:
                raise InputError("HB mode needs a fixed candidate list")
            for theta, N in fixed:
                self._introduce(theta, N, 0)
        else:
            self.thetas.append(cfg.theta0)
            self.norms.append(self.schedule.N0 if mode == LNB else cfg.N)
            self._introduce(cfg.theta0, self.norms[0], 0)

    # bookkeeping -----------------------------------------------------------
    def _introduce(self, theta, N, t):
        if theta <= self.cfg.theta0 * (1 + 1e-12):
            B = bounds.norm_for_lengthscale(self.cfg.theta0, theta, N, self.cfg.dim)
        else:
            B = (self.cfg.theta0 / theta) ** (self.cfg.dim / 2) * N
        cand = HyperCandidate(theta, N, B, t)
        self.candidates.append(cand)
        return cand

    @property
    def active(self):
        return [c for c in self.candidates if c.active]

    def n_active(self):
        return len(self.active)

    def find(self, theta, N=None):
        for c in self.candidates:
            if c.theta == theta and (N is None or c.N == N):
                return c
        return None

    def reference(self):
        """Largest introduced well-specified candidate, if the truth is known."""
        if self.theta_star is None:
            return None
        pool = [c for c in self.candidates if c.theta <= self.theta_star]
        if self.mode != LB and self.N_star is not None:
            pool = [c for c in pool if c.N >= self.N_star]
        if not pool:
            return None
        return min(pool, key=lambda c: (-c.theta, c.N))

    def xi(self, t):
        if self.xi_variant == "closed_form":
            return bounds.xi_closed_form(t, self.cfg.dim, self.schedule.g(t), self.cfg.delta,
                                         self.cfg.sigma_n)
        return bounds.xi(t, len(self.candidates), self.cfg.delta_b, self.cfg.sigma_n)

    # policy interface ------------------------------------------------------
    def select(self):
        act = self.active
        if not act:
            raise InvariantViolation("active candidate set is empty")
        return min(act, key=lambda c: (c.bound(self.cfg, c.n + 1), -c.theta, -c.N))

    def choose(self, t, data):
        c = self.select()
        return Choice(c.theta, c.N, c.B, key=c.key)

    def update(self, t, choice, y, beta_sigma):
        cand = self.find(*choice.key)
        cand.plays.append(t)
        cand.sum_y += y
        cand.sum_beta_sigma += beta_sigma
        if self.check_invariants:
            self._check_balancing(t, cand)
        xi_t = self.xi(t)
        removed = self.eliminate(t, xi_t)
        if self.mode != HB:
            self.admit(t)
        if self.check_invariants and self.mode != HB:
            self._check_counting(t)
        self.history.append({"t": t, "selected": cand.key, "eliminated": removed})
        return {"eliminated": removed, "n_active": self.n_active(), "xi": xi_t}

    def eliminate(self, t, xi_t):
        act = self.active
        if any(c.n == 0 for c in act):
            return []
        L = [l_stat(c, t, xi_t) for c in act]
        best = max(L)
        removed = []
        for c, Lc in zip(act, L):
            if Lc + 2 * c.sum_beta_sigma / c.n < best:
                c.active = False
                c.eliminated_at = t
                removed.append(c.key)
        if self.check_invariants:
            top = act[int(np.argmax(L))]
            if not top.active:
                raise InvariantViolation("the candidate with the largest L was eliminated",
                                         {"t": t, "candidate": top.key, "L": L})
            if not self.active:
                raise InvariantViolation("elimination emptied the active set", {"t": t})
        return removed

    def admit(self, t):
        new_thetas = []
        self.l, added = cands.admit_lengthscales(self.l, t, self.schedule)
        for theta in added:
            self.thetas.append(theta)
            new_thetas.append(theta)
            for N in self.norms:
                self._introduce(theta, N, t)
        if self.mode == LNB:
            self.j, added_n = cands.admit_norms(self.j, t, self.schedule)
            for N in added_n:
                self.norms.append(N)
                for theta in self.thetas:
                    self._introduce(theta, N, t)

    # runtime checks --------------------------------------------------------
    def _check_counting(self, t):
        cap = cands.max_lengthscale_count(t, self.schedule)
        if self.mode == LNB:
            cap *= cands.max_norm_count(t, self.schedule)
        if len(self.candidates) > cap:
            raise InvariantViolation("more candidates introduced than the counting bound allows",
                                     {"t": t, "count": len(self.candidates), "cap": cap})

    def _check_balancing(self, t, cand):
        ref = self.reference()
        if ref is None or not ref.active or ref.n < 1 or ref is cand:
            return
        self.balance_checks += 1
        lhs = cand.bound(self.cfg, cand.n)
        rhs = ref.bound(self.cfg, ref.n) + 2 * ref.B
        if lhs > rhs + ASSERT_TOL:
            raise InvariantViolation(
                "balancing condition violated",
                {"t": t, "selected": cand.key, "n": cand.n, "R": lhs,
                 "reference": ref.key, "n_ref": ref.n, "R_ref_plus_2B": rhs},
            )
        if cand.theta > ref.theta or (self.mode == LNB and cand.N < ref.N):
            ratio = math.sqrt(cand.n / ref.n)
            cap = 2 * (self.cfg.theta0 / ref.theta) ** self.cfg.dim
            if self.mode == LNB and self.N_star is not None:
                cap *= self.N_star / self.schedule.N0
            if ratio > cap + ASSERT_TOL:
                raise InvariantViolation(
                    "play-count ratio bound violated",
                    {"t": t, "selected": cand.key, "n": cand.n, "reference": ref.key,
                     "n_ref": ref.n, "ratio": ratio, "cap": cap},
                )


def candidate_summary(policy):
    """Plain-data view of a balancer's candidates, safe to pickle across workers."""
    ref = policy.reference()
    return {
        "candidates": [(c.theta, c.N, c.introduced_at, c.eliminated_at, c.n)
                       for c in policy.candidates],
        "n_thetas": len(policy.thetas), "n_norms": len(policy.norms),
        "reference": None if ref is None else ref.key,
        "balance_checks": policy.balance_checks,
    }


def replay_statistics(trace, xi_values=None):
    """Recompute per-candidate running sums from a trace, in play order."""
    stats = {}
    for rec in trace.records:
        key = (rec.theta, rec.norm)
        s = stats.setdefault(key, {"n": 0, "sum_y": 0.0, "sum_beta_sigma": 0.0})
        s["n"] += 1
        s["sum_y"] += rec.y
        s["sum_beta_sigma"] += rec.beta * rec.sigma
    return stats


def step(loop):
    """One iteration of the balancing loop (select, query, eliminate, admit)."""
    return loop.step()


def run(policy, objective, data, T, seed, **loop_kw):
    if T < 0:
        raise InputError("T must be non-negative")
    loop = BOLoop(objective, policy, data, seed=seed, **loop_kw)
    return loop.run(T)
