"""Command-line front end.

    igkit [--out PATH] [--seed N] [--quiet] {fit,glm,cv,corr,simulate} ...

Every command prints one JSON report envelope. Exit status is 0 on success,
2 for input or usage errors and 3 for numerical failures (degenerate
samples, rank-deficient designs, non-convergence).
"""

import argparse
import csv
import datetime as _dt
import hashlib
import json
import logging
import math
from pathlib import Path
import sys
import warnings

import numpy as np

from . import __version__, reference
from .data import load_csv
from .diagnostics import CvConfig, correlation_report, density_overlay, diagnostic_bundle, k_fold_cv
from .exceptions import HeaderMismatch, InputError, NumericalError
from .fpt import DriftParams, empirical_vs_theoretical, fpt_to_ig_params, simulate_fpt
from .glm import GlmSpec, irls_fit, predict
from .inference import DISTRIBUTIONS, compare_distributions

SCHEMA_VERSION = "1.0"
EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 2, 3

log = logging.getLogger("igkit")


# -- serialization -------------------------------------------------------------


def to_jsonable(obj):
    """Plain JSON types; non-finite floats become "inf", "-inf" or "nan"."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dumps(obj):
    # repr-based float output is the shortest string that round-trips exactly.
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False)


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()


def envelope(command, payload, input_digest=None, seeds=None):
    return {
        "command": command,
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "input_digest": input_digest,
        "seeds": seeds or {},
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "payload": payload,
    }


def write_series_csv(path, columns):
    """Write equal-length series under a one-line header of their names."""
    names = list(columns)
    rows = zip(*(np.asarray(columns[n]).tolist() for n in names))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])
    return str(path)


def _split(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _deviation(observed, published):
    return {"observed": observed, "published": published, "deviation": observed - published}


# -- commands ------------------------------------------------------------------


def _load(args):
    table = load_csv(args.csv)
    return table, file_digest(args.csv)


def _column(table, name):
    if name not in table:
        raise HeaderMismatch([name], table.names)
    return table[name]


def cmd_fit(args):
    table, digest = _load(args)
    x = _column(table, args.column)
    names = _split(args.distributions)
    for nm in names:
        if nm not in DISTRIBUTIONS:
            raise InputError(f"unknown distribution {nm!r}; choose from {', '.join(DISTRIBUTIONS)}")
    comp = compare_distributions(
        x, location=args.location, ks_method=args.ks_method, n_boot=args.n_boot,
        seed=args.seed, distributions=names,
    )
    payload = {"column": args.column, "n": int(x.size), **comp.as_dict()}
    if args.reference:
        payload["reference"] = {
            r.name: _deviation(r.ks.statistic, reference.KS_STATISTICS[r.name]) for r in comp.rows
        }
    if args.plot_dir:
        overlay = density_overlay(x, comp, bins=args.bins)
        plot_dir = Path(args.plot_dir)
        plot_dir.mkdir(parents=True, exist_ok=True)
        edges = overlay["edges"]
        payload["plots"] = [
            write_series_csv(plot_dir / "histogram.csv", {
                "bin_left": edges[:-1], "bin_right": edges[1:], "density": overlay["density"],
            }),
            write_series_csv(plot_dir / "density_curves.csv", {"x": overlay["grid"], **overlay["curves"]}),
        ]
    return payload, digest, {"bootstrap": args.seed}


def _glm_inputs(args, table):
    y = _column(table, args.response)
    preds = _split(args.predictors)
    for nm in preds:
        _column(table, nm)
    spec = GlmSpec(link=args.link, max_iterations=args.max_iter, tolerance=args.tol,
                   intercept=not args.no_intercept)
    return table.matrix(preds), y, preds, spec


def cmd_glm(args):
    table, digest = _load(args)
    X, y, preds, spec = _glm_inputs(args, table)
    fit = irls_fit(X, y, spec)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        mu = predict(fit, X)
    payload = {"response": args.response, "predictors": preds, **fit.as_dict(preds)}
    payload["fitted_summary"] = {
        "min": float(mu.min()), "max": float(mu.max()), "non_positive": int(np.sum(mu <= 0)),
    }
    if args.diagnostics:
        bundle = diagnostic_bundle(fit, X, y)
        plot_dir = Path(args.plot_dir or (Path(args.out).parent if args.out else "."))
        plot_dir.mkdir(parents=True, exist_ok=True)
        files = []
        for panel, series in bundle.items():
            if isinstance(series, dict):
                files.append(write_series_csv(plot_dir / f"{panel}.csv", series))
        payload["diagnostics"] = bundle
        payload["plots"] = files
    return payload, digest, {}


def cmd_cv(args):
    table, digest = _load(args)
    X, y, preds, spec = _glm_inputs(args, table)
    config = CvConfig(folds=args.folds, seed=args.seed, shuffle=not args.no_shuffle)
    report = k_fold_cv(X, y, spec, config)
    payload = {"response": args.response, "predictors": preds, "link": spec.link, **report.as_dict()}
    payload["reference"] = {
        "test_r2": _deviation(report.test.r2, reference.CV_5FOLD["test"]["r2"]),
    }
    if args.reference:
        for part in ("train", "test"):
            for key in ("mse", "mae", "r2"):
                payload["reference"][f"{part}_{key}"] = _deviation(
                    getattr(getattr(report, part), key), reference.CV_5FOLD[part][key]
                )
    return payload, digest, {"folds": args.seed}


def cmd_corr(args):
    table, digest = _load(args)
    _column(table, args.target)
    preds = _split(args.predictors) if args.predictors else None
    for nm in preds or []:
        _column(table, nm)
    rows = correlation_report(table, args.target, preds)
    payload = {"target": args.target, "rows": [r.as_dict() for r in rows]}
    if args.reference:
        payload["reference"] = {
            r.pair: _deviation(r.r, reference.CORRELATIONS[r.pair]["r"])
            for r in rows if r.pair in reference.CORRELATIONS
        }
    return payload, digest, {}


def cmd_simulate(args):
    params = DriftParams(args.drift, args.sigma, args.barrier)
    s = simulate_fpt(params, dt=args.dt, max_time=args.max_time, n_paths=args.paths,
                     seed=args.seed, bridge_correction=args.bridge)
    payload = {"drift": params.nu, "sigma": params.sigma, "barrier": params.barrier, **s.summary()}
    if params.nu > 0:
        ig = fpt_to_ig_params(params)
        payload["implied_params"] = ig.as_dict()
        payload["theoretical"] = {"mean": ig.mean, "variance": ig.variance}
        if s.censored == 0:
            payload["ks"] = empirical_vs_theoretical(s).as_dict()
    if args.emit_hits:
        payload["hits_file"] = write_series_csv(args.emit_hits, {"hit_time": s.hits})
    return payload, None, {"paths": args.seed}


# -- argument parsing ----------------------------------------------------------


def _globals(parser, suppress):
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--out", default=default(None), help="write the report here instead of stdout")
    parser.add_argument("--seed", type=int, default=default(0), help="master seed (unsigned 64-bit)")
    parser.add_argument("--quiet", action="store_true", default=default(False),
                        help="suppress log messages on stderr")


def _model_flags(p):
    p.add_argument("--response", default="PE")
    p.add_argument("--predictors", default="T,V,AP,RH", help="comma-separated column names")
    p.add_argument("--link", default="identity", choices=["identity", "log", "inverse-squared"])
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--no-intercept", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(prog="igkit", description=__doc__.split("\n\n")[0])
    _globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    _globals(common, suppress=True)

    p = sub.add_parser("fit", parents=[common], help="fit IG, normal and exponential laws to a column")
    p.add_argument("csv")
    p.add_argument("--column", default="PE")
    p.add_argument("--distributions", default=",".join(DISTRIBUTIONS))
    p.add_argument("--location", default="zero", choices=["zero", "shifted"],
                   help="fit IG/exponential with zero location or with a fitted shift")
    p.add_argument("--ks-method", default="asymptotic-naive",
                   choices=["asymptotic-naive", "parametric-bootstrap"])
    p.add_argument("--n-boot", type=int, default=999)
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--plot-dir", help="write histogram and density-curve CSVs here")
    p.add_argument("--reference", action="store_true", help="annotate with published CCPP values")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("glm", parents=[common], help="fit the IG-GLM")
    p.add_argument("csv")
    _model_flags(p)
    p.add_argument("--diagnostics", action="store_true", help="add diagnostic series and plot CSVs")
    p.add_argument("--plot-dir")
    p.set_defaults(func=cmd_glm)

    p = sub.add_parser("cv", parents=[common], help="k-fold cross-validation of the IG-GLM")
    p.add_argument("csv")
    _model_flags(p)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--no-shuffle", action="store_true")
    p.add_argument("--reference", action="store_true")
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("corr", parents=[common], help="correlation table with significance tests")
    p.add_argument("csv")
    p.add_argument("--target", default="PE")
    p.add_argument("--predictors", help="comma-separated; default all other columns")
    p.add_argument("--reference", action="store_true")
    p.set_defaults(func=cmd_corr)

    p = sub.add_parser("simulate", parents=[common], help="first-passage times of drifted Brownian motion")
    p.add_argument("--drift", type=float, required=True)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--barrier", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--paths", type=int, default=10_000)
    p.add_argument("--max-time", type=float, help="default: IG quantile at 1 - 1e-6")
    p.add_argument("--bridge", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--emit-hits", help="write raw hitting times to this CSV")
    p.set_defaults(func=cmd_simulate)
    return parser


def _emit(report, out):
    text = dumps(report) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO,
                        format="igkit: %(message)s")
    try:
        payload, digest, seeds = args.func(args)
    except (InputError, FileNotFoundError, NumericalError, ValueError) as exc:
        code = EXIT_NUMERICAL if isinstance(exc, NumericalError) else EXIT_INPUT
        error = {"type": type(exc).__name__, "message": str(exc)}
        for attr in ("missing", "row", "column", "trace"):
            if hasattr(exc, attr):
                error[attr] = getattr(exc, attr)
        log.error("%s: %s", type(exc).__name__, exc)
        _emit({"command": args.command, "schema_version": SCHEMA_VERSION, "error": error}, args.out)
        return code
    _emit(envelope(args.command, payload, digest, seeds), args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
