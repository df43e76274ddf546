"""Experiment runner: configs, per-seed runs, summaries, histograms and output files."""
import csv
import hashlib
import json
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import benchmarks
from .baselines import AGPUCBPolicy, MLEPolicy, OraclePolicy, mle_lengthscale
from .balancer import HB, LB, LNB, Balancer, candidate_summary
from .bounds import BoundConfig
from .candidates import CandidateSchedule, GrowthFn, default_t0
from .errors import ConfigError, FileError, InputError, RunFailure
from .kernels import KernelSpec
from .loop import BOLoop, initial_design
from .trace import IterationRecord, RegretTrace

METHODS = ("LB", "LNB", "AGPUCB", "MLE", "Oracle", "HBFixed")
MLE_ON_INIT = "mle_on_init"
WORKERS_ENV = "BALANCEDBO_WORKERS"
HIST_BINS = 20
# settings that do not change what a single (method, seed) run computes
_HASH_EXCLUDE = ("seeds", "output_dir", "methods")


@dataclass
class ExperimentConfig:
    """Keys of the JSON config file; anything else is rejected.

    ``theta0`` is a number or ``"mle_on_init"``. ``growth`` and ``norm_growth``
    hold ``{"t0": ..., "a": ...}``; a null ``t0`` in ``growth`` means
    ``default_t0(d)``.
    """

    objective: str
    methods: list
    T: int = 100
    seeds: list = field(default_factory=lambda: [0])
    objective_params: dict = field(default_factory=dict)
    initial_design: int = 10
    growth: dict = field(default_factory=lambda: {"t0": None, "a": 0.5})
    norm_growth: dict = field(default_factory=lambda: {"t0": 1.0, "a": 0.0})
    delta: float = 0.1
    sigma_n: float = 0.01
    theta0: object = MLE_ON_INIT
    N: float = 1.0
    kernel: str = "matern"
    nu: float = 2.5
    mig_variant: str = "eigendecay"
    mle: dict = field(default_factory=lambda: {"lower": 1e-3, "upper": 2.0, "restarts": 1})
    oracle: dict = field(default_factory=dict)
    hb_candidates: list = field(default_factory=list)
    theta_star: float = None
    N_star: float = None
    standardize: bool = True
    check_invariants: bool = True
    xi_variant: str = "running"
    output_dir: str = "runs"

    def __post_init__(self):
        if isinstance(self.methods, str):
            self.methods = [self.methods]
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise ConfigError(f"unknown methods {bad}; choose from {METHODS}")
        if not isinstance(self.T, int) or self.T < 1:
            raise ConfigError("T must be an integer >= 1")
        if not self.seeds:
            raise ConfigError("seeds must be non-empty")
        if any(not isinstance(s, int) for s in self.seeds):
            raise ConfigError("seeds must be integers")
        if self.initial_design < 0:
            raise ConfigError("initial_design must be >= 0")
        if self.theta0 != MLE_ON_INIT and not (isinstance(self.theta0, (int, float))
                                               and self.theta0 > 0):
            raise ConfigError(f"theta0 must be a positive number or {MLE_ON_INIT!r}")
        if self.theta0 == MLE_ON_INIT and self.initial_design < 1:
            raise ConfigError("theta0 from MLE needs an initial design")
        for name in ("growth", "norm_growth"):
            extra = set(getattr(self, name)) - {"t0", "a"}
            if extra:
                raise ConfigError(f"{name} has unknown keys {sorted(extra)}")
        extra = set(self.mle) - {"lower", "upper", "restarts"}
        if extra:
            raise ConfigError(f"mle has unknown keys {sorted(extra)}")
        if "HBFixed" in self.methods and not self.hb_candidates:
            raise ConfigError("HBFixed needs hb_candidates")

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        if "method" in data and "methods" not in data:
            data = dict(data)
            data["methods"] = data.pop("method")
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {unknown}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}: {exc.msg}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self):
        return asdict(self)


def config_hash(cfg, method=None):
    d = {k: v for k, v in cfg.to_dict().items() if k not in _HASH_EXCLUDE}
    if method is not None:
        d["method"] = method
    text = json.dumps(d, sort_keys=True, separators=(",", ":"), default=repr)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


# single runs ----------------------------------------------------------------
def _build_objective(cfg):
    return benchmarks.make_objective(cfg.objective, **cfg.objective_params)


def _truth(cfg, objective, theta0):
    theta_star, N_star = cfg.theta_star, cfg.N_star
    meta = objective.meta
    if theta_star is None and "theta" in meta:
        theta_star = meta["theta"]
    if N_star is None and theta_star is not None and "norm" in meta:
        N_star = meta["norm"] * (theta_star / theta0) ** (objective.dim / 2)
    return theta_star, N_star


def make_policy(cfg, method, theta0, d, objective=None):
    spec = KernelSpec(cfg.kernel, theta0, d, cfg.nu)
    bcfg = BoundConfig(spec, N=cfg.N, delta=cfg.delta, sigma_n=cfg.sigma_n,
                       mig_variant=cfg.mig_variant)
    t0 = cfg.growth.get("t0")
    g = GrowthFn(default_t0(d) if t0 is None else t0, cfg.growth.get("a", 0.5))
    b = GrowthFn(cfg.norm_growth.get("t0", 1.0), cfg.norm_growth.get("a", 0.0))
    mle = dict({"lower": 1e-3, "upper": 2.0, "restarts": 1}, **cfg.mle)
    if method == "Oracle":
        return OraclePolicy(bcfg, cfg.oracle.get("theta"), cfg.oracle.get("N"))
    if method == "AGPUCB":
        return AGPUCBPolicy(bcfg, g, b)
    if method == "MLE":
        return MLEPolicy(bcfg, mle["lower"], mle["upper"], mle["restarts"], cfg.standardize)
    theta_star, N_star = _truth(cfg, objective, theta0) if objective else (None, None)
    common = dict(theta_star=theta_star, N_star=N_star, check_invariants=cfg.check_invariants,
                  xi_variant=cfg.xi_variant)
    if method == "HBFixed":
        return Balancer(bcfg, mode=HB, fixed=[tuple(p) for p in cfg.hb_candidates], **common)
    sched = CandidateSchedule(theta0, cfg.N, d, g, b)
    return Balancer(bcfg, sched, mode=LB if method == "LB" else LNB, **common)


def run_single(cfg, method, seed, objective=None):
    """One (method, seed) run: initial design, theta0, then T loop steps."""
    objective = objective or _build_objective(cfg)
    data, domain = initial_design(objective, cfg.initial_design, seed, cfg.sigma_n)
    if cfg.theta0 == MLE_ON_INIT:
        mle = dict({"lower": 1e-3, "upper": 2.0, "restarts": 1}, **cfg.mle)
        spec = KernelSpec(cfg.kernel, 1.0, objective.dim, cfg.nu)
        theta0 = mle_lengthscale(data, spec, mle["lower"], mle["upper"], mle["restarts"],
                                 cfg.standardize)
    else:
        theta0 = float(cfg.theta0)
    policy = make_policy(cfg, method, theta0, objective.dim, objective)
    policy.name = method
    loop = BOLoop(objective, policy, data, domain=domain, seed=seed,
                  standardize=cfg.standardize, config_hash=config_hash(cfg, method))
    trace = loop.run(cfg.T)
    trace.meta.update(theta0=theta0, objective=objective.name, policy=policy)
    if isinstance(policy, Balancer):
        trace.meta["balancer"] = candidate_summary(policy)
    return trace


_OBJECTIVE_CACHE = {}


def _worker(payload):
    cfg_dict, method, seed = payload
    cfg = ExperimentConfig.from_dict(cfg_dict)
    key = json.dumps([cfg.objective, cfg.objective_params], sort_keys=True, default=repr)
    try:
        if key not in _OBJECTIVE_CACHE:
            _OBJECTIVE_CACHE[key] = _build_objective(cfg)
        trace = run_single(cfg, method, seed, _OBJECTIVE_CACHE[key])
        trace.meta.pop("policy", None)
        return method, seed, trace, None
    except Exception as exc:  # recorded per seed; the summary decides what to do
        info = {"type": type(exc).__name__, "message": str(exc),
                "diagnostics": getattr(exc, "diagnostics", None)}
        return method, seed, None, info


def worker_count(jobs):
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
        if n < 1:
            raise ConfigError(f"{WORKERS_ENV} must be >= 1")
        return min(n, jobs)
    return max(1, min(os.cpu_count() or 1, jobs))


@dataclass
class SummaryReport:
    rows: list
    curves: dict
    failures: list

    def row(self, method):
        for r in self.rows:
            if r["method"] == method:
                return r
        raise KeyError(method)


def _mean_stderr(values):
    v = np.asarray(values, dtype=float)
    mean = v.mean(axis=0)
    if v.shape[0] < 2:
        return mean, np.full_like(mean, math.nan)
    return mean, v.std(axis=0, ddof=1) / math.sqrt(v.shape[0])


def summarize(traces, failures=()):
    by_method = {}
    for tr in sorted(traces, key=lambda tr: tr.seed):
        by_method.setdefault(tr.method, []).append(tr)
    rows, curves = [], {}
    for method, group in by_method.items():
        T = min(len(tr) for tr in group)
        cum = [tr.column("cum_regret")[:T] for tr in group]
        best = [tr.column("best_regret")[:T] for tr in group]
        cm, cs = _mean_stderr(cum)
        bm_, bs = _mean_stderr(best)
        curves[method] = {"cum_regret": (cm, cs), "best_regret": (bm_, bs)}
        rows.append({
            "method": method, "T": T, "seeds": [tr.seed for tr in group],
            "cum_regret_mean": float(cm[-1]), "cum_regret_stderr": float(cs[-1]),
            "best_regret_mean": float(bm_[-1]), "best_regret_stderr": float(bs[-1]),
            "wall_time": float(sum(tr.wall_time for tr in group)),
        })
    return SummaryReport(rows, curves, list(failures))


def run_experiment(cfg, workers=None):
    """Run every (method, seed) pair; returns (traces, summary).

    Failed seeds are listed in ``summary.failures`` and trigger a warning;
    if nothing succeeds a RunFailure is raised.
    """
    jobs = [(m, s) for m in cfg.methods for s in cfg.seeds]
    n = workers or worker_count(len(jobs))
    payloads = [(cfg.to_dict(), m, s) for m, s in jobs]
    if n == 1:
        results = [_worker(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(_worker, payloads))
    order = {m: i for i, m in enumerate(cfg.methods)}
    results.sort(key=lambda r: (order[r[0]], r[1]))
    traces = [r[2] for r in results if r[2] is not None]
    failures = [{"method": r[0], "seed": r[1], **r[3]} for r in results if r[3] is not None]
    if not traces:
        raise RunFailure(f"all {len(jobs)} runs failed; first: {failures[0]['message']}",
                         failures)
    if failures:
        warnings.warn(f"{len(failures)} of {len(jobs)} runs failed; summary covers the rest")
    return traces, summarize(traces, failures)


# histograms -----------------------------------------------------------------
DISCRETE_METHODS = ("LB", "LNB", "AGPUCB", "Oracle", "HBFixed", "HB")


def lengthscale_histogram(traces, bins=HIST_BINS):
    """Rows (method, lower, upper, value, proportion) of selected lengthscales.

    Discrete methods get one bin per exact value; MLE gets ``bins`` log-spaced bins.
    """
    if not traces:
        raise InputError("lengthscale_histogram needs at least one trace")
    by_method = {}
    for tr in traces:
        by_method.setdefault(tr.method, []).extend(tr.column("theta").tolist())
    rows = []
    for method, thetas in by_method.items():
        th = np.asarray(thetas, dtype=float)
        total = len(th)
        if method in DISCRETE_METHODS or th.min() == th.max():
            values, counts = np.unique(th, return_counts=True)
            rows += [(method, float(v), float(v), float(v), c / total)
                     for v, c in zip(values, counts)]
            continue
        edges = np.geomspace(th.min(), th.max(), bins + 1)
        counts, _ = np.histogram(th, bins=edges)
        for lo, hi, c in zip(edges[:-1], edges[1:], counts):
            rows.append((method, float(lo), float(hi), float(math.sqrt(lo * hi)), c / total))
    return rows


def modal_lengthscale(hist_rows, method):
    rows = [r for r in hist_rows if r[0] == method]
    if not rows:
        raise KeyError(method)
    return max(rows, key=lambda r: (r[4], r[3]))[3]


# files ----------------------------------------------------------------------
def trace_columns(d):
    return (["t", "method", "seed", "theta", "norm", "bound"]
            + [f"x{i + 1}" for i in range(d)]
            + ["y", "f", "best_y", "best_f", "regret", "cum_regret", "best_regret",
               "known_max", "n_active", "eliminated", "xi", "beta", "sigma", "beta_sigma"])


def _fmt(v):
    return repr(float(v)) if v is not None else ""


def _trace_rows(tr):
    km = tr.known_max
    for r in tr.records:
        elim = "|".join(f"{repr(float(a))}:{repr(float(b))}" for a, b in r.eliminated)
        yield ([str(r.t), r.method, str(tr.seed), _fmt(r.theta), _fmt(r.norm), _fmt(r.bound)]
               + [_fmt(v) for v in r.x]
               + [_fmt(r.y), _fmt(r.f), _fmt(r.best_y), _fmt(r.best_f), _fmt(r.regret),
                  _fmt(r.cum_regret), _fmt(r.best_regret), _fmt(km), str(r.n_active), elim,
                  _fmt(r.xi), _fmt(r.beta), _fmt(r.sigma), _fmt(r.beta_sigma)])


def write_trace(tr, path):
    d = len(tr.records[0].x) if tr.records else 0
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(trace_columns(d))
            w.writerows(_trace_rows(tr))
    except OSError as exc:
        raise FileError(exc.strerror or str(exc), path) from exc


def read_trace(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InputError(f"{path} is empty")
    header, body = rows[0], rows[1:]
    xcols = [i for i, h in enumerate(header) if h.startswith("x") and h[1:].isdigit()]
    idx = {h: i for i, h in enumerate(header)}
    records = []
    for row in body:
        def num(name):
            return float(row[idx[name]])
        elim = tuple(tuple(float(z) for z in p.split(":"))
                     for p in row[idx["eliminated"]].split("|") if p)
        records.append(IterationRecord(
            t=int(row[idx["t"]]), method=row[idx["method"]], theta=num("theta"),
            norm=num("norm"), bound=num("bound"), x=tuple(float(row[i]) for i in xcols),
            y=num("y"), f=num("f"), best_y=num("best_y"), best_f=num("best_f"),
            regret=num("regret"), cum_regret=num("cum_regret"), best_regret=num("best_regret"),
            n_active=int(row[idx["n_active"]]), eliminated=elim, xi=num("xi"), beta=num("beta"),
            sigma=num("sigma"), beta_sigma=num("beta_sigma"),
        ))
    if not records:
        return RegretTrace(Path(path).stem, -1, [])
    km = row[idx["known_max"]]
    return RegretTrace(records[0].method, int(body[0][idx["seed"]]), records,
                       float(km) if km else None)


def emit_outputs(traces, summary, directory, histogram=None):
    """Write traces/, summary.json, histogram.csv and curves.csv under ``directory``."""
    if not traces:
        raise InputError("emit_outputs needs at least one trace")
    out = Path(directory)
    try:
        (out / "traces").mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise FileError(exc.strerror or str(exc), out) from exc
    paths = []
    for tr in traces:
        p = out / "traces" / f"{tr.method}_seed{tr.seed}.csv"
        write_trace(tr, p)
        paths.append(p)
    histogram = histogram if histogram is not None else lengthscale_histogram(traces)

    def _write(path, writer_fn):
        try:
            with open(path, "w", newline="") as fh:
                writer_fn(fh)
        except OSError as exc:
            raise FileError(exc.strerror or str(exc), path) from exc
        paths.append(path)

    def _summary(fh):
        json.dump({"methods": summary.rows, "failures": summary.failures}, fh, indent=2,
                  default=repr)
        fh.write("\n")

    def _hist(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "lower", "upper", "value", "proportion"])
        w.writerows([r[0]] + [repr(float(v)) for v in r[1:]] for r in histogram)

    def _curves(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "t", "metric", "mean", "stderr"])
        for method, metrics in summary.curves.items():
            for metric, (mean, se) in metrics.items():
                for t, (m, s) in enumerate(zip(mean, se), start=1):
                    w.writerow([method, t, metric, repr(float(m)), repr(float(s))])

    _write(out / "summary.json", _summary)
    _write(out / "histogram.csv", _hist)
    _write(out / "curves.csv", _curves)
    return paths
