"""Exact GP regression with a fixed unit output scale.

The noise level ``sigma_n`` doubles as the ridge regulariser added to the
Gram matrix. With ``standardize=True`` the targets are z-scored before the
fit; means come back in the original units and variances are multiplied by
the squared scale.
"""
import numpy as np
from scipy.linalg import cho_solve, solve_triangular
from scipy.optimize import minimize_scalar
from scipy.spatial.distance import cdist

from . import kernels
from .errors import InputError

STD_FLOOR = 1e-12


class ObservationLog:
    """Ordered (x, y) pairs shared by every model fitted during a run."""

    def __init__(self, dim, sigma_n, points=None, values=None):
        if not sigma_n > 0:
            raise InputError(f"sigma_n must be positive, got {sigma_n}")
        self.dim = int(dim)
        self.sigma_n = float(sigma_n)
        self._x = []
        self._y = []
        if points is not None:
            pts = kernels._as_rows(points, self.dim, "points")
            vals = np.asarray(values, dtype=float).reshape(-1)
            if len(pts) != len(vals):
                raise InputError("points and values differ in length")
            for x, y in zip(pts, vals):
                self.append(x, y)

    def append(self, x, y):
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.size != self.dim:
            raise InputError(f"point has dimension {x.size}, expected {self.dim}")
        self._x.append(x.copy())
        self._y.append(float(y))

    def copy(self):
        out = ObservationLog(self.dim, self.sigma_n)
        out._x = [x.copy() for x in self._x]
        out._y = list(self._y)
        return out

    def __len__(self):
        return len(self._y)

    @property
    def X(self):
        if not self._x:
            return np.empty((0, self.dim))
        return np.vstack(self._x)

    @property
    def y(self):
        return np.asarray(self._y, dtype=float)


def standardization(y):
    """(mean, scale) used to z-score y; scale uses the n-1 divisor."""
    if len(y) == 0:
        return 0.0, 1.0
    mean = float(np.mean(y))
    if len(y) < 2:
        return mean, 1.0
    return mean, max(float(np.std(y, ddof=1)), STD_FLOOR)


class PosteriorModel:
    def __init__(self, spec, X, L, alpha, y_mean, y_scale, jitter):
        self.spec = spec
        self.X = X
        self.L = L
        self.alpha = alpha
        self.y_mean = y_mean
        self.y_scale = y_scale
        self.jitter = jitter

    @property
    def n(self):
        return len(self.X)

    def _check(self, Xq):
        return kernels._as_rows(Xq, self.spec.dim, "query")

    def predict(self, Xq, standardized=False):
        """Posterior mean and variance at each row of Xq."""
        Xq = self._check(Xq)
        if self.n == 0:
            mu = np.zeros(len(Xq))
            var = np.ones(len(Xq))
        else:
            Ks = kernels.cross(self.spec, self.X, Xq)
            mu = Ks.T @ self.alpha
            V = solve_triangular(self.L, Ks, lower=True, check_finite=False)
            var = np.maximum(1.0 - np.einsum("ij,ij->j", V, V), 0.0)
        if standardized:
            return mu, var
        return self.y_mean + self.y_scale * mu, self.y_scale**2 * var

    def mean(self, Xq):
        return self.predict(Xq)[0]

    def var(self, Xq, standardized=False):
        return self.predict(Xq, standardized=standardized)[1]


def _factor(spec, X, sigma_n):
    K = kernels.gram(spec, X)
    K[np.diag_indices_from(K)] += sigma_n**2
    return kernels.cholesky_jittered(K)


def fit(log, spec, standardize=False):
    if log.dim != spec.dim:
        raise InputError(f"log has dimension {log.dim}, kernel expects {spec.dim}")
    X, y = log.X, log.y
    mean, scale = standardization(y) if standardize else (0.0, 1.0)
    if len(y) == 0:
        return PosteriorModel(spec, X, None, None, mean, scale, 0.0)
    z = (y - mean) / scale
    L, jitter = _factor(spec, X, log.sigma_n)
    alpha = solve_triangular(
        L.T, solve_triangular(L, z, lower=True, check_finite=False),
        lower=False, check_finite=False,
    )
    return PosteriorModel(spec, X, L, alpha, mean, scale, jitter)


def posterior_mean(model, x):
    return float(model.mean(np.asarray(x, dtype=float).reshape(1, -1))[0])


def posterior_var(model, x):
    return float(model.var(np.asarray(x, dtype=float).reshape(1, -1))[0])


def lml_from_sqdist(spec, sqdist, y, sigma_n):
    """Log evidence given precomputed squared distances between inputs."""
    K = kernels._profile(spec, sqdist)
    K[np.diag_indices_from(K)] += sigma_n**2
    L, jitter = kernels.cholesky_jittered(K)
    alpha = cho_solve((L, True), y, check_finite=False)
    if jitter == 0.0:
        # one refinement step; y^T K^-1 y can be large when sigma_n is small
        alpha += cho_solve((L, True), y - K @ alpha, check_finite=False)
    return float(-0.5 * y @ alpha - np.sum(np.log(np.diag(L))) - 0.5 * len(y) * np.log(2 * np.pi))


OUTPUTSCALE_RANGE = (1e-6, 1e8)


def profiled_lml_from_sqdist(spec, sqdist, y, sigma_n, bounds=OUTPUTSCALE_RANGE):
    """Log evidence maximised over the outputscale s^2 in K_s = s^2 K + sigma_n^2 I.

    One eigendecomposition of K turns the evidence into a cheap 1-D function of s^2.
    Returns (lml, s^2).
    """
    lam, U = np.linalg.eigh(kernels._profile(spec, sqdist))
    lam = np.clip(lam, 0.0, None)
    z2 = (U.T @ y) ** 2
    n = len(y)
    noise = sigma_n**2

    def neg(log_s2):
        c = np.exp(log_s2) * lam + noise
        return 0.5 * float(np.sum(z2 / c + np.log(c)))

    lo, hi = np.log(bounds[0]), np.log(bounds[1])
    res = minimize_scalar(neg, bounds=(lo, hi), method="bounded", options={"xatol": 1e-6})
    return float(-res.fun - 0.5 * n * np.log(2 * np.pi)), float(np.exp(res.x))


def log_marginal_likelihood(log, spec, standardize=False):
    """Gaussian log evidence of y under N(0, K + sigma_n^2 I)."""
    if len(log) < 1:
        raise InputError("log marginal likelihood needs at least one observation")
    if log.dim != spec.dim:
        raise InputError(f"log has dimension {log.dim}, kernel expects {spec.dim}")
    y = log.y
    if standardize:
        mean, scale = standardization(y)
        y = (y - mean) / scale
    X = log.X
    return lml_from_sqdist(spec, cdist(X, X, "sqeuclidean"), y, log.sigma_n)
