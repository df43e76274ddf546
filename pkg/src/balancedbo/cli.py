"""Command-line entry point: ``balancedbo run|estimate-theta|histogram|bench-list``."""
import argparse
import glob
import json
import logging
import sys
import warnings

from . import benchmarks, harness
from .baselines import estimate_theta_star
from .errors import (ConfigError, DataFormatError, FileError, InputError, NumericalError,
                     RunFailure)

log = logging.getLogger("balancedbo")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC, EXIT_PARTIAL = 0, 2, 3, 4, 5
_FAILURE_CODES = {"NumericalError": EXIT_NUMERIC, "DataFormatError": EXIT_DATA,
                  "InputError": EXIT_DATA, "ConfigError": EXIT_CONFIG}


def _params(pairs):
    out = {}
    for p in pairs or []:
        key, sep, value = p.partition("=")
        if not sep:
            raise ConfigError(f"--param expects key=value, got {p!r}")
        try:
            out[key] = json.loads(value)
        except json.JSONDecodeError:
            out[key] = value
    return out


def cmd_run(args):
    cfg = harness.ExperimentConfig.load(args.config)
    if args.seeds:
        try:
            cfg.seeds = [int(s) for s in args.seeds.split(",")]
        except ValueError:
            raise ConfigError(f"--seeds must be comma-separated integers, got {args.seeds!r}")
    out = args.out or cfg.output_dir
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            traces, summary = harness.run_experiment(cfg)
    except RunFailure as exc:
        for f in exc.failures:
            log.error("%s seed %s: %s: %s", f["method"], f["seed"], f["type"], f["message"])
        return _FAILURE_CODES.get(exc.failures[0]["type"], EXIT_NUMERIC) if exc.failures else 1
    harness.emit_outputs(traces, summary, out)
    for row in summary.rows:
        print(f"{row['method']:8s} T={row['T']} seeds={len(row['seeds'])} "
              f"cum={row['cum_regret_mean']:.4g}±{row['cum_regret_stderr']:.2g} "
              f"best={row['best_regret_mean']:.4g}±{row['best_regret_stderr']:.2g}")
    print(f"outputs written to {out}")
    if summary.failures:
        for f in summary.failures:
            log.error("%s seed %s failed: %s: %s", f["method"], f["seed"], f["type"],
                      f["message"])
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_estimate_theta(args):
    obj = benchmarks.make_objective(args.objective, **_params(args.param))
    theta = estimate_theta_star(obj, sample_count=args.samples, top_fraction=args.top,
                                seed=args.seed)
    print(repr(theta))
    return EXIT_OK


def cmd_histogram(args):
    paths = sorted(glob.glob(args.traces))
    if not paths:
        raise InputError(f"no trace files match {args.traces!r}")
    traces = [harness.read_trace(p) for p in paths]
    rows = harness.lengthscale_histogram(traces)
    try:
        with open(args.out, "w") as fh:
            fh.write("method,lower,upper,value,proportion\n")
            for r in rows:
                fh.write(",".join([r[0]] + [repr(float(v)) for v in r[1:]]) + "\n")
    except OSError as exc:
        raise FileError(exc.strerror or str(exc), args.out) from exc
    print(f"{len(rows)} bins from {len(traces)} traces written to {args.out}")
    return EXIT_OK


def cmd_bench_list(args):
    for name, (_, desc) in benchmarks.REGISTRY.items():
        print(f"{name:12s} {desc}")
    print("\ntabular schema: comma-separated, one header row, columns x1..xd then y;")
    print(f"bundled fixture: {benchmarks.FIXTURE.name}")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="balancedbo", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="execute an experiment config")
    r.add_argument("--config", required=True)
    r.add_argument("--seeds", help="comma-separated seeds overriding the config")
    r.add_argument("--out", help="output directory overriding the config")
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("estimate-theta", help="MLE lengthscale on the top fraction of samples")
    e.add_argument("--objective", required=True)
    e.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="objective parameter (JSON value), repeatable")
    e.add_argument("--samples", type=int, default=10_000)
    e.add_argument("--top", type=float, default=0.01)
    e.add_argument("--seed", type=int, required=True)
    e.set_defaults(func=cmd_estimate_theta)

    h = sub.add_parser("histogram", help="lengthscale histogram from trace files")
    h.add_argument("--traces", required=True, help="glob of trace csv files")
    h.add_argument("--out", required=True)
    h.set_defaults(func=cmd_histogram)

    b = sub.add_parser("bench-list", help="list built-in objectives")
    b.set_defaults(func=cmd_bench_list)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except (DataFormatError, InputError) as exc:
        log.error("data error: %s", exc)
        return EXIT_DATA
    except NumericalError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC
    except FileError as exc:
        log.error("file error: %s", exc)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
