"""Comparison methods built on the same GP-UCB loop as the balancer.

* ``OraclePolicy``: a fixed lengthscale and norm bound.
* ``AGPUCBPolicy``: lengthscale theta0 / g(t), norm bound B(theta_t, N) * b(t).
* ``MLEPolicy``: lengthscale refitted by marginal likelihood every iteration.
"""
import math

import numpy as np
from scipy.spatial.distance import cdist

from . import gp
from .acquisition import GOLDEN
from .candidates import CONSTANT_ONE, GrowthFn, growth_eval
from .errors import InputError, NumericalError
from .loop import BOLoop, Choice, Policy

MLE_GRID = 33
MLE_REFINE = 48
# grid values this close to the best count as ties; the longest such lengthscale wins
PLATEAU_TOL = 1e-8


def scaled_norm(cfg, theta, N):
    """B(theta, N); lengthscales above theta0 (only MLE can produce them) shrink it."""
    return (cfg.theta0 / theta) ** (cfg.dim / 2) * N


class OraclePolicy(Policy):
    name = "Oracle"

    def __init__(self, cfg, theta=None, N=None):
        super().__init__(cfg)
        self.theta = cfg.theta0 if theta is None else float(theta)
        if not self.theta > 0:
            raise InputError("oracle lengthscale must be positive")
        self.N = cfg.N if N is None else float(N)

    def choose(self, t, data):
        return Choice(self.theta, self.N, scaled_norm(self.cfg, self.theta, self.N))


class AGPUCBPolicy(Policy):
    name = "AGPUCB"

    def __init__(self, cfg, g=GrowthFn(), b=CONSTANT_ONE):
        super().__init__(cfg)
        self.g = g
        self.b = b

    def lengthscale(self, t):
        return self.cfg.theta0 / growth_eval(self.g, t)

    def choose(self, t, data):
        theta = self.lengthscale(t)
        return Choice(theta, self.cfg.N, scaled_norm(self.cfg, theta, self.cfg.N) * growth_eval(self.b, t))


def _golden_max(f, a, b, evals):
    c, d = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    best = max((fc, c), (fd, d))
    for _ in range(max(evals - 2, 0)):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
            best = max(best, (fc, c))
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
            best = max(best, (fd, d))
    return best


def mle_lengthscale(log, spec, lower, upper, restarts=1, standardize=True,
                    grid=MLE_GRID, refine=MLE_REFINE, fit_outputscale=False):
    """Lengthscale maximising the log marginal likelihood within [lower, upper].

    Log-spaced grid, then golden-section refinement (in log theta) between the
    neighbours of each of the ``restarts`` best grid points. Where the
    likelihood is flat to within PLATEAU_TOL the longest lengthscale is kept.
    With ``fit_outputscale`` the evidence is maximised over the kernel
    amplitude at every lengthscale instead of fixing it at 1.
    """
    if not 0 < lower < upper:
        raise InputError(f"need 0 < lower < upper, got {lower}, {upper}")
    if len(log) < 1:
        raise InputError("MLE needs at least one observation")
    X, y = log.X, log.y
    if standardize:
        mean, scale = gp.standardization(y)
        y = (y - mean) / scale
    sq = cdist(X, X, "sqeuclidean")

    def lml(log_theta):
        k = spec.with_theta(math.exp(log_theta))
        try:
            if fit_outputscale:
                return gp.profiled_lml_from_sqdist(k, sq, y, log.sigma_n)[0]
            return gp.lml_from_sqdist(k, sq, y, log.sigma_n)
        except (NumericalError, np.linalg.LinAlgError):
            return -math.inf

    lo, hi = math.log(lower), math.log(upper)
    nodes = np.linspace(lo, hi, grid)
    vals = np.array([lml(z) for z in nodes])
    if not np.any(np.isfinite(vals)):
        raise NumericalError("every likelihood evaluation failed")
    top = float(vals.max())
    i0 = int(np.flatnonzero(vals >= top - PLATEAU_TOL)[-1])
    best = (float(vals[i0]), float(nodes[i0]))
    order = [i0] + [int(i) for i in np.argsort(-vals, kind="stable") if i != i0]
    for i in order[:max(restarts, 1)]:
        if not np.isfinite(vals[i]):
            continue
        a, b = nodes[max(i - 1, 0)], nodes[min(i + 1, grid - 1)]
        cand = _golden_max(lml, float(a), float(b), refine)
        if cand[0] > best[0] + PLATEAU_TOL:
            best = cand
    return float(min(max(math.exp(best[1]), lower), upper))


class MLEPolicy(Policy):
    name = "MLE"

    def __init__(self, cfg, lower=1e-3, upper=2.0, restarts=1, standardize=True):
        super().__init__(cfg)
        if not 0 < lower < upper:
            raise InputError("MLE search bounds need 0 < lower < upper")
        self.lower, self.upper = lower, upper
        self.restarts = restarts
        self.standardize = standardize

    def choose(self, t, data):
        if len(data) == 0:
            theta = self.cfg.theta0
        else:
            theta = mle_lengthscale(data, self.cfg.kernel, self.lower, self.upper,
                                    self.restarts, self.standardize)
        return Choice(theta, self.cfg.N, scaled_norm(self.cfg, theta, self.cfg.N))


def _run(policy, objective, data, T, seed, **kw):
    return BOLoop(objective, policy, data, seed=seed, **kw).run(T)


def run_oracle(cfg, objective, data, T, seed, theta=None, N=None, **kw):
    return _run(OraclePolicy(cfg, theta, N), objective, data, T, seed, **kw)


def run_agpucb(cfg, objective, data, T, seed, g=GrowthFn(), b=CONSTANT_ONE, **kw):
    return _run(AGPUCBPolicy(cfg, g, b), objective, data, T, seed, **kw)


def run_mle(cfg, objective, data, T, seed, lower=1e-3, upper=2.0, restarts=1, **kw):
    return _run(MLEPolicy(cfg, lower, upper, restarts), objective, data, T, seed, **kw)


def estimate_theta_star(objective=None, dataset=None, sample_count=10_000, top_fraction=0.01,
                        seed=0, kernel=None, sigma_n=0.01, lower=1e-3, upper=2.0, restarts=1,
                        fit_outputscale=True):
    """Lengthscale fitted by MLE to the best ``top_fraction`` of uniform samples.

    Pass either an objective with a box domain or ``dataset=(X, y)``. The top
    slice covers a small region, so after standardisation its amplitude says
    nothing about the global one; by default the outputscale is fitted too.
    """
    from .kernels import KernelSpec

    if dataset is None:
        rng = np.random.default_rng(seed)
        X = objective.domain.sample(rng, sample_count)
        y = np.array([objective(x) for x in X])
    else:
        X, y = (np.asarray(a, dtype=float) for a in dataset)
    k = int(round(top_fraction * len(y)))
    if k < 10:
        raise InputError(f"top fraction keeps only {k} points; need at least 10")
    top = np.argsort(-y, kind="stable")[:k]
    log = gp.ObservationLog(X.shape[1], sigma_n, X[top], y[top])
    spec = kernel if kernel is not None else KernelSpec(dim=X.shape[1])
    return mle_lengthscale(log, spec, lower, upper, restarts, standardize=True,
                           fit_outputscale=fit_outputscale)
