"""Information-gain bounds, confidence radii and suspected regret bounds.

Everything here is closed form. ``mig_bound`` provides two Matern variants:
``"eigendecay"`` (the default, exponent d/(2nu+d) from the polynomial-eigendecay
argument) and ``"main"`` (exponent d(d+1)/(2nu+d(d+1))).
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .kernels import RBF, KernelSpec

EIGENDECAY = "eigendecay"
MAIN = "main"


@dataclass(frozen=True)
class BoundConfig:
    """Shared constants of the confidence parameters.

    ``kernel.theta`` is the initial (longest) lengthscale theta0 and ``N`` the
    norm bound under it. ``delta`` is split evenly between the GP confidence
    event and the noise concentration event.
    """

    kernel: KernelSpec
    N: float = 1.0
    delta: float = 0.1
    sigma_n: float = 0.01
    mig_variant: str = EIGENDECAY
    clamp_increments: bool = True

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise InputError(f"delta must lie in (0, 1), got {self.delta}")
        if not self.N > 0:
            raise InputError(f"N must be positive, got {self.N}")
        if self.sigma_n < 0:
            raise InputError("sigma_n must be non-negative")
        if self.mig_variant not in (EIGENDECAY, MAIN):
            raise InputError(f"unknown MIG variant {self.mig_variant!r}")

    @property
    def theta0(self):
        return self.kernel.theta

    @property
    def dim(self):
        return self.kernel.dim

    @property
    def delta_a(self):
        return self.delta / 2

    @property
    def delta_b(self):
        return self.delta / 2


def mig_bound(spec, T, variant=EIGENDECAY):
    """Order of the maximum information gain after T observations."""
    if T < 2:
        raise InputError(f"mig_bound needs T >= 2, got {T}")
    d = spec.dim
    logT = math.log(T)
    scale = spec.theta ** (-d)
    if spec.family == RBF:
        return scale * logT ** (d + 1)
    nu = spec.nu
    if variant == EIGENDECAY:
        power = d / (2 * nu + d)
    elif variant == MAIN:
        power = d * (d + 1) / (2 * nu + d * (d + 1))
    else:
        raise InputError(f"unknown MIG variant {variant!r}")
    return scale * T**power * logT ** (2 * nu / (2 * nu + d))


def _mig_array(spec, ts, variant):
    """mig_bound over an integer array, clamping T below at 2."""
    ts = np.maximum(np.asarray(ts, dtype=float), 2.0)
    d = spec.dim
    logT = np.log(ts)
    scale = spec.theta ** (-d)
    if spec.family == RBF:
        return scale * logT ** (d + 1)
    nu = spec.nu
    power = d / (2 * nu + d) if variant == EIGENDECAY else d * (d + 1) / (2 * nu + d * (d + 1))
    return scale * ts**power * logT ** (2 * nu / (2 * nu + d))


def exact_info_gain(gram, sigma_n):
    """0.5 * log det(I + K / sigma_n^2)."""
    gram = np.asarray(gram, dtype=float)
    n = gram.shape[0] if gram.ndim == 2 else 0
    if n == 0:
        return 0.0
    from .kernels import cholesky_jittered

    L, _ = cholesky_jittered(np.eye(n) + gram / sigma_n**2)
    return float(np.sum(np.log(np.diag(L))))


def norm_for_lengthscale(theta0, theta, N, d):
    """Norm bound B(theta, N) = (theta0/theta)^(d/2) * N."""
    if not 0 < theta <= theta0 * (1 + 1e-12):
        raise InputError(f"need 0 < theta <= theta0, got theta={theta}, theta0={theta0}")
    if not N > 0:
        raise InputError(f"N must be positive, got {N}")
    return (theta0 / theta) ** (d / 2) * N


def beta(cfg, theta, t, B=None):
    """Confidence radius at iteration t for a model with lengthscale theta.

    B defaults to B(theta, cfg.N); pass it explicitly for norm candidates.
    """
    if t < 1:
        raise InputError(f"t must be >= 1, got {t}")
    if B is None:
        B = norm_for_lengthscale(cfg.theta0, theta, cfg.N, cfg.dim)
    gamma = mig_bound(cfg.kernel.with_theta(theta), max(t - 1, 2), cfg.mig_variant)
    return B + cfg.sigma_n * math.sqrt(2 * (gamma + 1 + math.log(1 / cfg.delta_a)))


def regret_bound_from_gamma(B, gamma, t):
    """sqrt(t) * (B sqrt(gamma) + gamma)."""
    return math.sqrt(t) * (B * math.sqrt(gamma) + gamma)


def regret_curve(cfg, theta, t_max, B=None):
    """Suspected regret bound R(0..t_max) as an array, R(0) = 0.

    With ``cfg.clamp_increments`` every increment R(t+1) - R(t), t >= 1, is
    capped at 2B. Returns (curve, n_clamped).
    """
    if B is None:
        B = norm_for_lengthscale(cfg.theta0, theta, cfg.N, cfg.dim)
    ts = np.arange(1, t_max + 1, dtype=float)
    gamma = _mig_array(cfg.kernel.with_theta(theta), ts, cfg.mig_variant)
    raw = np.sqrt(ts) * (B * np.sqrt(gamma) + gamma)
    n_clamped = 0
    if cfg.clamp_increments and t_max > 1:
        inc = np.diff(raw)
        capped = np.minimum(inc, 2 * B)
        n_clamped = int(np.count_nonzero(inc > 2 * B))
        raw = np.concatenate(([raw[0]], raw[0] + np.cumsum(capped)))
    return np.concatenate(([0.0], raw)), n_clamped


def suspected_regret_bound(cfg, theta, t, B=None):
    if t < 1:
        raise InputError(f"t must be >= 1, got {t}")
    return float(regret_curve(cfg, theta, int(t), B)[0][int(t)])


def xi(t, num_candidates, delta_b, sigma_n):
    """Noise concentration width 2 sigma^2 log(|A| pi^2 t^2 / (6 delta_b))."""
    if t < 1 or num_candidates < 1:
        raise InputError("xi needs t >= 1 and num_candidates >= 1")
    return 2 * sigma_n**2 * math.log(num_candidates * math.pi**2 * t**2 / (6 * delta_b))


def xi_closed_form(t, d, g_t, delta, sigma_n):
    """Variant with |A| replaced by d ln g(t), floored at one candidate."""
    count = max(d * math.log(g_t), 1.0)
    return 2 * sigma_n**2 * math.log(count * math.pi**2 * t**2) - math.log(3 * delta)
