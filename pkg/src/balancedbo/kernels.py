"""Stationary isotropic kernels with a lengthscale, k(x/theta, x'/theta).

Both kernels have unit output scale, so k(x, x) == 1 exactly.
"""
from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial.distance import cdist

from .errors import InputError, UnsupportedParameterError

RBF = "rbf"
MATERN = "matern"
SUPPORTED_NU = (0.5, 1.5, 2.5)


@dataclass(frozen=True)
class KernelSpec:
    family: str = MATERN
    theta: float = 1.0
    dim: int = 1
    nu: float = 2.5

    def __post_init__(self):
        if self.family not in (RBF, MATERN):
            raise UnsupportedParameterError(f"unknown kernel family {self.family!r}")
        if not self.theta > 0:
            raise InputError(f"lengthscale must be positive, got {self.theta}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise InputError(f"dim must be a positive integer, got {self.dim}")
        if self.family == MATERN:
            if not self.nu > 0:
                raise InputError(f"nu must be positive, got {self.nu}")
            if self.nu not in SUPPORTED_NU:
                raise UnsupportedParameterError(
                    f"Matern nu={self.nu} unsupported; use one of {SUPPORTED_NU}"
                )

    def with_theta(self, theta):
        return replace(self, theta=float(theta))


def _as_rows(X, dim, name="X"):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1) if dim > 1 or X.size == 1 else X.reshape(-1, 1)
    if X.ndim != 2 or X.shape[1] != dim:
        raise InputError(f"{name} has shape {X.shape}, expected (n, {dim})")
    return X


def _profile(spec, sqdist):
    """Kernel value as a function of squared input distance."""
    sq = np.maximum(sqdist, 0.0) / spec.theta**2
    if spec.family == RBF:
        return np.exp(-sq)
    r = np.sqrt(sq)
    if spec.nu == 0.5:
        return np.exp(-r)
    if spec.nu == 1.5:
        s = np.sqrt(3.0) * r
        return (1.0 + s) * np.exp(-s)
    s = np.sqrt(5.0) * r
    return (1.0 + s + (5.0 / 3.0) * sq) * np.exp(-s)


def kernel_eval(spec, x, x2):
    """Covariance between two single points."""
    x = np.asarray(x, dtype=float).reshape(-1)
    x2 = np.asarray(x2, dtype=float).reshape(-1)
    if x.size != spec.dim or x2.size != spec.dim:
        raise InputError(f"points must have dimension {spec.dim}")
    diff = x - x2
    return float(_profile(spec, np.dot(diff, diff)))


def cross(spec, X, Y):
    """Cross-covariance matrix with entries k(X[i], Y[j])."""
    X = _as_rows(X, spec.dim, "X")
    Y = _as_rows(Y, spec.dim, "Y")
    return _profile(spec, cdist(X, Y, "sqeuclidean"))


def gram(spec, X):
    X = _as_rows(X, spec.dim)
    K = _profile(spec, cdist(X, X, "sqeuclidean"))
    # cdist leaves exact zeros on the diagonal; enforce symmetry bit-for-bit anyway
    return np.triu(K) + np.triu(K, 1).T


def cholesky_jittered(A, start=1e-9, factor=10.0, max_jitter=1e-4):
    """Lower Cholesky factor of A, adding diagonal jitter only on failure.

    Returns (L, jitter). Raises NumericalError once jitter exceeds max_jitter.
    """
    from .errors import NumericalError

    n = A.shape[0]
    jitter = 0.0
    while True:
        try:
            L = np.linalg.cholesky(A if jitter == 0.0 else A + jitter * np.eye(n))
            return L, jitter
        except np.linalg.LinAlgError:
            jitter = start if jitter == 0.0 else jitter * factor
            if jitter > max_jitter * (1 + 1e-12):
                raise NumericalError(
                    f"Cholesky failed with jitter up to {max_jitter:g}",
                    condition=float(np.linalg.cond(A)),
                ) from None
