"""Objective functions: closed-form test functions, RKHS samples and lookup tables.

An ``Objective`` wraps a vectorised ``fn`` mapping an (n, d) array to n values.
``evaluate`` adds Gaussian noise of scale ``noise`` and returns (noisy, clean).
"""
import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .acquisition import Box, Discrete
from .errors import DataFormatError, InputError, NumericalError

DEFAULT_NOISE = 0.01
DOMAIN_TOL = 1e-12

# Frozen from an offline dense-scan + local-refinement oracle.
TOY_MAX = 1.0119155630165109
TOY_ARGMAX = 0.30016359494368494
MICHALEWICZ_MAX = {2: 1.8013034100985534, 5: 4.687658179088141}

FIXTURE = Path(__file__).with_name("data") / "synthetic_barrel.csv"


@dataclass
class Objective:
    name: str
    fn: object
    domain: object
    known_max: float = None
    noise: float = DEFAULT_NOISE
    meta: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.domain.dim

    def _check(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dim:
            raise InputError(f"{self.name}: expected {self.dim} coordinates, got {X.shape[1]}")
        if isinstance(self.domain, Box):
            lo, hi = self.domain.lower - DOMAIN_TOL, self.domain.upper + DOMAIN_TOL
            if np.any(X < lo) or np.any(X > hi):
                raise InputError(f"{self.name}: point outside the domain")
        return X

    def values(self, X):
        return np.asarray(self.fn(self._check(X)), dtype=float)

    def __call__(self, x):
        return float(self.values(np.reshape(x, (1, -1)))[0])

    def evaluate(self, x, rng):
        f = self(x)
        y = f + self.noise * rng.standard_normal() if self.noise else f
        return float(y), f


def _toy(X):
    x = X[:, 0]
    return 0.6 * np.exp(-((x - 1.0) ** 2) / (2 * 0.25**2)) + np.exp(-((x - 0.3) ** 2) / (2 * 0.035**2))


def toy_1d(x):
    """Narrow global peak near 0.3 and a broad distractor at 1."""
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise InputError(f"toy_1d is defined on [0, 1], got {x}")
    return float(_toy(np.array([[x]]))[0])


def toy_objective(noise=DEFAULT_NOISE):
    return Objective("toy_1d", _toy, Box.unit(1), TOY_MAX, noise,
                     {"argmax": TOY_ARGMAX})


def _michalewicz(X, m=10):
    i = np.arange(1, X.shape[1] + 1)
    return np.sum(np.sin(X) * np.sin(i * X**2 / np.pi) ** (2 * m), axis=1)


def michalewicz(x, d=5, m=10):
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != d:
        raise InputError(f"expected {d} coordinates, got {x.size}")
    if np.any(x < 0) or np.any(x > np.pi):
        raise InputError("michalewicz is defined on [0, pi]^d")
    return float(_michalewicz(x[None], m)[0])


def michalewicz_objective(d=5, m=10, noise=DEFAULT_NOISE):
    km = MICHALEWICZ_MAX.get(d) if m == 10 else None
    box = Box(np.zeros(d), np.full(d, np.pi))
    return Objective(f"michalewicz{d}", lambda X: _michalewicz(X, m), box, km, noise)


def constant_objective(value=0.0, d=1, noise=DEFAULT_NOISE):
    return Objective("constant", lambda X: np.full(len(X), float(value)), Box.unit(d),
                     float(value), noise)


def unit_cube(objective):
    """The same objective reparametrised onto [0, 1]^d."""
    box = objective.domain
    if not isinstance(box, Box):
        raise InputError("unit_cube needs a box domain")
    lo, width = box.lower, box.upper - box.lower

    def fn(U):
        return objective.fn(lo + width * U)

    return Objective(objective.name, fn, Box.unit(box.dim), objective.known_max,
                     objective.noise, dict(objective.meta, scaled_from=box))


def _refine_max(fn, starts, box):
    best = -math.inf
    bounds = list(zip(box.lower, box.upper))
    for x0 in starts:
        r = minimize(lambda z: -fn(z[None])[0], x0, method="L-BFGS-B", bounds=bounds,
                     options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 500})
        best = max(best, -float(r.fun), float(fn(np.asarray(x0)[None])[0]))
    return best


def scan_max(fn, box, seed=0, random_points=10**6, grid_per_dim=None, starts=8):
    """Dense scan (grid for d <= 2, random otherwise) followed by local refinement."""
    d = box.dim
    if d <= 2:
        n = grid_per_dim or (100_001 if d == 1 else 1001)
        axes = [np.linspace(box.lower[j], box.upper[j], n) for j in range(d)]
        X = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, d)
        vals = np.concatenate([fn(X[i:i + 200_000]) for i in range(0, len(X), 200_000)])
    else:
        rng = np.random.default_rng(seed)
        X = box.sample(rng, random_points)
        vals = np.concatenate([fn(X[i:i + 100_000]) for i in range(0, len(X), 100_000)])
    top = np.argsort(-vals, kind="stable")[:starts]
    return max(float(vals[top[0]]), _refine_max(fn, X[top], box))


def sample_rkhs_function(spec, norm_budget, basis_count, seed, noise=DEFAULT_NOISE,
                         scan=True, max_tries=5):
    """f = sum_j alpha_j k(., c_j) with RKHS norm exactly ``norm_budget``.

    Centers are uniform in [0, 1]^d. ``meta`` carries the ground truth
    (theta, norm, centers, alpha).
    """
    if basis_count < 1 or int(basis_count) != basis_count:
        raise InputError("basis_count must be a positive integer")
    if not norm_budget > 0:
        raise InputError("norm_budget must be positive")
    ss = np.random.SeedSequence(seed)
    for child in ss.spawn(max_tries):
        rng = np.random.default_rng(child)
        C = rng.random((int(basis_count), spec.dim))
        alpha = rng.standard_normal(int(basis_count))
        sq = float(alpha @ kernels.gram(spec, C) @ alpha)
        if sq > 1e-200:
            break
    else:
        raise NumericalError(f"could not draw a nonzero RKHS function in {max_tries} tries")
    alpha = alpha * (norm_budget / math.sqrt(sq))
    if alpha.sum() < 0:
        alpha = -alpha

    def fn(X):
        return kernels.cross(spec, X, C) @ alpha

    box = Box.unit(spec.dim)
    km = scan_max(fn, box, seed=seed) if scan else None
    meta = {"spec": spec, "theta": spec.theta, "norm": float(norm_budget), "centers": C,
            "alpha": alpha}
    return Objective(f"rkhs_{spec.family}_{spec.theta:g}", fn, box, km, noise, meta)


def rkhs_norm(objective):
    m = objective.meta
    spec = m["spec"]
    return math.sqrt(float(m["alpha"] @ kernels.gram(spec, m["centers"]) @ m["alpha"]))


@dataclass(frozen=True)
class TabularSchema:
    """Column names; by default every column but the last is an input."""

    x_columns: tuple = None
    y_column: str = None


@dataclass
class TabularBenchmark:
    name: str
    X: np.ndarray
    y: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    @property
    def d(self):
        return self.X.shape[1]

    @property
    def known_max(self):
        return float(self.y.max())

    def __len__(self):
        return len(self.y)

    def objective(self, noise=0.0, allow_requery=False):
        lookup = {tuple(row): v for row, v in zip(self.X.tolist(), self.y.tolist())}

        def fn(X):
            try:
                return np.array([lookup[tuple(row)] for row in X.tolist()])
            except KeyError as exc:
                raise InputError(f"{self.name}: point {exc.args[0]} is not a table row") from None

        return Objective(self.name, fn, Discrete(self.X, allow_requery=allow_requery),
                         self.known_max, noise)


def _number(text, path, line):
    try:
        value = float(text)
    except ValueError:
        raise DataFormatError(f"not a number: {text!r}", path, line) from None
    if not math.isfinite(value):
        raise DataFormatError(f"non-finite value {text!r}", path, line)
    return value


def load_tabular(path, schema=TabularSchema()):
    path = Path(path)
    try:
        fh = path.open(newline="")
    except OSError as exc:
        raise InputError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise InputError(f"{path} is empty")
        header = [h.strip() for h in header]
        ycol = schema.y_column or header[-1]
        xcols = list(schema.x_columns) if schema.x_columns else [h for h in header if h != ycol]
        missing = [c for c in xcols + [ycol] if c not in header]
        if missing:
            raise DataFormatError(f"missing columns {missing}", path, 1)
        xi = [header.index(c) for c in xcols]
        yi = header.index(ycol)
        groups = {}
        for line, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataFormatError(f"expected {len(header)} fields, got {len(row)}", path, line)
            x = tuple(_number(row[i], path, line) for i in xi)
            groups.setdefault(x, []).append(_number(row[yi], path, line))
    if not groups:
        raise InputError(f"{path} has no data rows")
    X = np.array(list(groups), dtype=float)
    y = np.array([sum(v) / len(v) for v in groups.values()])
    lo, hi = X.min(axis=0), X.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    return TabularBenchmark(path.stem, (X - lo) / span, y, lo, hi)


def _tabular_from(path=None, noise=0.0, x_columns=None, y_column=None):
    schema = TabularSchema(tuple(x_columns) if x_columns else None, y_column)
    return load_tabular(path or FIXTURE, schema).objective(noise)


def _rkhs(family=kernels.MATERN, theta=0.2, dim=1, norm=2.0, basis_count=20, seed=0,
          noise=DEFAULT_NOISE):
    return sample_rkhs_function(kernels.KernelSpec(family, theta, dim), norm, basis_count,
                                seed, noise)


def _michalewicz_unit(d=5, m=10, noise=DEFAULT_NOISE):
    return unit_cube(michalewicz_objective(d, m, noise))


REGISTRY = {
    "toy_1d": (toy_objective, "narrow peak at 0.3, broad distractor at 1; params: noise"),
    "michalewicz": (_michalewicz_unit, "Michalewicz on [0,pi]^d rescaled to the unit cube; params: d, m, noise"),
    "constant": (constant_objective, "flat function; params: value, d, noise"),
    "rkhs": (_rkhs, "random RKHS function; params: family, theta, dim, norm, basis_count, seed, noise"),
    "tabular": (_tabular_from, "lookup table from csv (x1..xd, y); params: path, x_columns, y_column, noise"),
}


def make_objective(name, **params):
    try:
        factory = REGISTRY[name][0]
    except KeyError:
        raise InputError(f"unknown objective {name!r}; known: {sorted(REGISTRY)}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise InputError(f"bad parameters for {name}: {exc}") from exc
