"""The GP-UCB loop shared by every method.

Methods differ only in their policy: which lengthscale and norm bound to use
at each iteration, and what to do with the observed reward afterwards.
"""
import math
import time
from dataclasses import dataclass

import numpy as np

from . import gp
from .acquisition import Discrete, MaximizerBudget, maximize_ucb
from .bounds import beta as confidence_radius
from .errors import InvariantViolation
from .trace import IterationRecord, RegretTrace

KNOWN_MAX_TOL = 1e-9


@dataclass(frozen=True)
class Choice:
    theta: float
    norm: float
    bound: float
    key: object = None


class Policy:
    """Base class; subclasses set ``name`` and implement ``choose``."""

    name = "policy"

    def __init__(self, cfg):
        self.cfg = cfg

    def choose(self, t, data):
        raise NotImplementedError

    def update(self, t, choice, y, beta_sigma):
        return {}

    def n_active(self):
        return 1


def initial_design(objective, n, seed, sigma_n):
    """Uniform random starting points (rows without replacement on tables).

    Returns (log, domain) where domain is a per-run copy for tables.
    """
    rng = np.random.default_rng(seed)
    domain = objective.domain
    log = gp.ObservationLog(domain.dim, sigma_n)
    if isinstance(domain, Discrete):
        domain = domain.fresh()
        rows = rng.choice(len(domain.points), size=min(n, len(domain.points)), replace=False)
        for i in rows:
            y, _ = objective.evaluate(domain.points[i], rng)
            log.append(domain.points[i], y)
            domain.queried.add(int(i))
    else:
        for x in domain.sample(rng, n):
            y, _ = objective.evaluate(x, rng)
            log.append(x, y)
    return log, domain


class BOLoop:
    def __init__(self, objective, policy, data, *, domain=None, seed=0,
                 standardize=True, budget=MaximizerBudget(), config_hash=""):
        self.objective = objective
        self.policy = policy
        self.data = data
        self.domain = domain if domain is not None else objective.domain
        if isinstance(self.domain, Discrete) and self.domain is objective.domain:
            self.domain = self.domain.fresh()
        noise_ss, acq_ss = np.random.SeedSequence(seed).spawn(2)
        self.noise_rng = np.random.default_rng(noise_ss)
        self.acq_rng = np.random.default_rng(acq_ss)
        self.standardize = standardize
        self.budget = budget
        self.t = 0
        self.trace = RegretTrace(policy.name, seed, known_max=objective.known_max,
                                 config_hash=config_hash)
        self._best_y = -math.inf
        self._best_f = -math.inf
        self._cum = 0.0

    def step(self):
        self.t += 1
        t = self.t
        choice = self.policy.choose(t, self.data)
        model = gp.fit(self.data, self.policy.cfg.kernel.with_theta(choice.theta),
                       standardize=self.standardize)
        beta = confidence_radius(self.policy.cfg, choice.theta, t, B=choice.bound)
        incumbent = self.data.X[int(np.argmax(self.data.y))] if len(self.data) else None
        prop = maximize_ucb(model, beta, self.domain, self.budget,
                            seed=int(self.acq_rng.integers(2**63)), incumbent=incumbent)
        sigma = math.sqrt(float(model.var(prop.x.reshape(1, -1))[0]))
        beta_sigma = beta * sigma
        try:
            y, f = self.objective.evaluate(prop.x, self.noise_rng)
        except Exception as exc:
            raise RuntimeError(f"objective query failed at iteration {t}: {exc}") from exc
        km = self.objective.known_max
        if km is not None and f > km + KNOWN_MAX_TOL:
            raise InvariantViolation(
                f"noiseless value {f!r} exceeds known maximum {km!r}",
                {"t": t, "x": prop.x.tolist(), "f": f, "known_max": km},
            )
        self.data.append(prop.x, y)
        if isinstance(self.domain, Discrete) and prop.index >= 0:
            self.domain.queried.add(prop.index)
        info = self.policy.update(t, choice, y, beta_sigma) or {}

        self._best_y = max(self._best_y, y)
        self._best_f = max(self._best_f, f)
        if km is None:
            r = cum = br = math.nan
        else:
            r = km - f
            self._cum = self._cum + r
            cum = self._cum
            br = km - self._best_f
        rec = IterationRecord(
            t=t, method=self.policy.name, theta=choice.theta, norm=choice.norm,
            bound=choice.bound, x=tuple(float(v) for v in prop.x), y=float(y), f=float(f),
            best_y=self._best_y, best_f=self._best_f, regret=r, cum_regret=cum,
            best_regret=br, n_active=int(info.get("n_active", self.policy.n_active())),
            eliminated=tuple(info.get("eliminated", ())), xi=float(info.get("xi", math.nan)),
            beta=beta, sigma=sigma, beta_sigma=beta_sigma,
        )
        self.trace.records.append(rec)
        return rec

    def run(self, T):
        start = time.perf_counter()
        for _ in range(T):
            self.step()
        self.trace.wall_time += time.perf_counter() - start
        return self.trace
