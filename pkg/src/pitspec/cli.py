"""Command-line front end.

Subcommands: ``test`` (bootstrap specification tests with a p-value
table), ``autocorrelogram`` (lagwise statistic bars with bootstrapped
critical values, as SVG + CSV), ``simulate``, ``estimate``, and ``mc``
(Monte Carlo size/power experiments from a plan file).

Exit codes: 0 ok, 2 input error, 3 fit failure, 4 bootstrap
instability, 5 config error.  All outputs are deterministic given the
flags and seed; no timestamps are embedded.
"""

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .bootstrap import (
    DEFAULT_SPECS,
    StatisticSpec,
    parametric_bootstrap,
    significance_stars,
)
from .errors import (
    ConfigError,
    DegenerateSampleError,
    FitError,
    InputError,
    LikelihoodError,
    PitspecError,
    StationarityError,
    UnstableBootstrapError,
)
from .estimation import fit_ml
from .models import ParamVector, model_from_id
from .models import simulate as simulate_series
from .montecarlo import ExperimentPlan, run_experiment

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_FIT = 3
EXIT_BOOTSTRAP = 4
EXIT_CONFIG = 5

REPORT_SCHEMA_VERSION = 1


# ---------------------------------------------------------------- data io


def read_series(path: str) -> np.ndarray:
    """Read a returns series from CSV: one numeric column, optional
    header row, optional leading date column."""
    try:
        with open(path, newline="") as fh:
            rows = [row for row in csv.reader(fh) if any(f.strip() for f in row)]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    if not rows:
        raise InputError(f"empty input: {path}")
    width = len(rows[0])
    if width not in (1, 2):
        raise InputError(f"expected 1 value column (plus optional date), got {width}")
    start = 0
    if not _is_number(rows[0][-1]):
        start = 1  # header row
        if len(rows) == 1:
            raise InputError(f"no data rows in {path}")
    values = []
    for lineno, row in enumerate(rows[start:], start=start + 1):
        if len(row) != width:
            raise InputError(f"ragged row at line {lineno} of {path}")
        f = row[-1].strip()
        if not _is_number(f):
            raise InputError(f"non-numeric value {f!r} at line {lineno} of {path}")
        values.append(float(f))
    y = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(y)):
        raise InputError(f"nonfinite value in {path}")
    return y


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return math.isfinite(float(text))


def write_series(path: str, y: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("y\n")
        for v in y:
            fh.write(f"{v:.17g}\n")


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ------------------------------------------------------------ test command


def _parse_stats(text: str) -> tuple:
    return tuple(StatisticSpec.parse(tok) for tok in text.split(",") if tok.strip())


def cmd_test(args) -> int:
    y = read_series(args.data)
    model = model_from_id(args.model)
    specs = _parse_stats(args.stats) if args.stats else DEFAULT_SPECS
    reports = parametric_bootstrap(
        model, y, specs, args.B, args.seed, burnin=args.burnin, workers=args.workers
    )
    payload = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "command": "test",
        "model": args.model,
        "n": int(y.shape[0]),
        "B": args.B,
        "seed": args.seed,
        "burnin": args.burnin,
        "statistics": [
            {
                "label": r.spec.label,
                "kind": r.spec.kind,
                "scope": r.spec.scope,
                "order": r.spec.param,
                "observed": r.observed,
                "p_value": r.p_value,
                "stars": significance_stars(r.p_value),
                "critical_values": {
                    f"{lv:.2f}": (cv if math.isfinite(cv) else None)
                    for lv, cv in r.critical_values.items()
                },
                "replicates_used": r.B,
                "failed_refits": r.n_failed,
            }
            for r in reports
        ],
    }
    _write_json(args.out, payload)
    print(f"Specification test  model={args.model}  n={y.shape[0]}  "
          f"B={args.B}  seed={args.seed}")
    print()
    print(f"{'statistic':<12} {'observed':>12} {'p-value':>10}")
    for r in reports:
        stars = significance_stars(r.p_value)
        print(f"{r.spec.label:<12} {r.observed:>12.6f} {r.p_value:>10.4f} {stars}")
    print()
    print("significance: *** 1%  ** 5%  * 10%")
    print(f"report written to {args.out}")
    return EXIT_OK


# -------------------------------------------------- autocorrelogram command


@dataclass(frozen=True)
class AutocorrelogramData:
    """Lagwise statistic bars (lag 0 = the marginal statistic) with
    per-lag bootstrapped critical values."""

    kind: str
    bars: tuple  # ((lag, value), ...)
    critical_values: dict  # level -> tuple per lag


def autocorrelogram_data(model, y, k, kind, B, seed, burnin, workers):
    specs = [StatisticSpec(kind, "marginal")]
    specs += [StatisticSpec(kind, "lag", j) for j in range(1, k + 1)]
    reports = parametric_bootstrap(
        model, y, specs, B, seed, burnin=burnin, workers=workers
    )
    bars = tuple((lag, r.observed) for lag, r in enumerate(reports))
    crits = {
        lv: tuple(r.critical_values[lv] for r in reports)
        for lv in reports[0].critical_values
    }
    return AutocorrelogramData(kind=kind, bars=bars, critical_values=crits)


def write_autocorrelogram_csv(path, data: AutocorrelogramData) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("lag", "value", "crit_10", "crit_5", "crit_1"))
        for lag, value in data.bars:
            writer.writerow(
                (
                    lag,
                    f"{value:.10g}",
                    f"{data.critical_values[0.10][lag]:.10g}",
                    f"{data.critical_values[0.05][lag]:.10g}",
                    f"{data.critical_values[0.01][lag]:.10g}",
                )
            )


_MARKERS = ((0.10, "X"), (0.05, "V"), (0.01, "I"))


def render_autocorrelogram_svg(data: AutocorrelogramData, title: str) -> str:
    """Self-contained SVG bar chart; critical values drawn as X/V/I
    glyphs above each lag."""
    width, height = 640, 420
    left, right, top, bottom = 60, 620, 50, 370
    finite = [v for _, vs in data.critical_values.items() for v in vs if math.isfinite(v)]
    ymax = max([v for _, v in data.bars] + finite + [1e-9]) * 1.15
    nbars = len(data.bars)
    slot = (right - left) / nbars
    bar_w = 0.55 * slot

    def xc(lag):
        return left + (lag + 0.5) * slot

    def yc(value):
        return bottom - (bottom - top) * (value / ymax)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="24" font-family="sans-serif" '
        f'font-size="15" text-anchor="middle">{title}</text>',
        f'<text x="{width / 2:.1f}" y="40" font-family="sans-serif" '
        f'font-size="11" text-anchor="middle">critical values: '
        f"10% - X, 5% - V, 1% - I</text>",
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" '
        f'stroke="black" stroke-width="1"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" '
        f'stroke="black" stroke-width="1"/>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        yv = frac * ymax
        parts.append(
            f'<text x="{left - 6}" y="{yc(yv) + 4:.1f}" font-family="sans-serif" '
            f'font-size="10" text-anchor="end">{yv:.3g}</text>'
        )
        parts.append(
            f'<line x1="{left - 4}" y1="{yc(yv):.1f}" x2="{left}" '
            f'y2="{yc(yv):.1f}" stroke="black" stroke-width="1"/>'
        )
    for lag, value in data.bars:
        x0 = xc(lag) - bar_w / 2
        parts.append(
            f'<rect x="{x0:.1f}" y="{yc(value):.1f}" width="{bar_w:.1f}" '
            f'height="{bottom - yc(value):.1f}" fill="#7a9cc6" stroke="#335"/>'
        )
        parts.append(
            f'<text x="{xc(lag):.1f}" y="{bottom + 16}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle">{lag}</text>'
        )
        for level, glyph in _MARKERS:
            cv = data.critical_values[level][lag]
            if math.isfinite(cv) and cv <= ymax:
                parts.append(
                    f'<text x="{xc(lag):.1f}" y="{yc(cv) + 4:.1f}" '
                    f'font-family="monospace" font-size="12" '
                    f'text-anchor="middle">{glyph}</text>'
                )
    parts.append(
        f'<text x="{(left + right) / 2:.1f}" y="{bottom + 34}" '
        f'font-family="sans-serif" font-size="12" text-anchor="middle">lag '
        f"(0 = marginal)</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_autocorrelogram(args) -> int:
    if args.k < 1:
        raise ConfigError("k must be at least 1")
    if args.norm not in ("cvm", "ks"):
        raise ConfigError(f"unknown norm: {args.norm!r}")
    y = read_series(args.data)
    model = model_from_id(args.model)
    data = autocorrelogram_data(
        model, y, args.k, args.norm, args.B, args.seed, args.burnin, args.workers
    )
    svg_path = args.out + ".svg"
    csv_path = args.out + ".csv"
    title = f"{args.norm.upper()} autocorrelogram, model {args.model}"
    with open(svg_path, "w") as fh:
        fh.write(render_autocorrelogram_svg(data, title))
    write_autocorrelogram_csv(csv_path, data)
    print(f"autocorrelogram written to {svg_path} and {csv_path}")
    return EXIT_OK


# ------------------------------------------------- simulate/estimate/mc


def cmd_simulate(args) -> int:
    model = model_from_id(args.model)
    raw = [tok for tok in args.params.split(",") if tok.strip()]
    layout = model.param_layout()
    if len(raw) != len(layout):
        names = ",".join(name for name, _ in layout)
        raise ConfigError(
            f"--params for {args.model} needs {len(layout)} values ({names})"
        )
    try:
        params = ParamVector.from_array(model, [float(tok) for tok in raw])
    except ValueError:
        raise ConfigError(f"non-numeric --params value in {args.params!r}") from None
    try:
        params.validate(model)
    except (StationarityError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    y = simulate_series(model, params, args.n, args.seed, burnin=args.burnin)
    write_series(args.out, y)
    print(f"simulated {args.n} observations to {args.out}")
    return EXIT_OK


def cmd_estimate(args) -> int:
    y = read_series(args.data)
    model = model_from_id(args.model)
    fit = fit_ml(model, y, compute_std_errors=True)
    if not fit.converged:
        raise FitError("fit failure on input data")
    names = [name for name, _ in model.param_layout()]
    estimates = {n: getattr(fit.params, n) for n in names}
    ses = dict(zip(names, fit.std_errors)) if fit.std_errors is not None else {}
    payload = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "command": "estimate",
        "model": args.model,
        "n": int(y.shape[0]),
        "converged": fit.converged,
        "iterations": fit.iterations,
        "loglik": fit.loglik_at_opt,
        "params": estimates,
        "std_errors": {
            n: (None if n not in ses or not math.isfinite(ses[n]) else ses[n])
            for n in names
        },
    }
    _write_json(args.out, payload)
    print(f"Model: {args.model}   n={y.shape[0]}")
    print(f"converged: {'yes' if fit.converged else 'no'}   "
          f"iterations: {fit.iterations}   loglik: {fit.loglik_at_opt:.6f}")
    print()
    print(f"{'parameter':<12} {'estimate':>12} {'std. error':>12}")
    for n in names:
        se = ses.get(n)
        se_text = f"{se:>12.6f}" if se is not None and math.isfinite(se) else f"{'--':>12}"
        print(f"{n:<12} {estimates[n]:>12.6f} {se_text}")
    print()
    print(f"estimates written to {args.out}")
    return EXIT_OK


_PLAN_REQUIRED = ("null_model", "dgp_model", "alpha1_grid", "n_grid", "reps",
                  "method", "seed")
_PLAN_OPTIONAL = ("B", "statistics", "burnin")


def parse_plan(path: str) -> ExperimentPlan:
    """Parse a flat key=value plan file (``#`` comments allowed)."""
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    entries = {}
    for lineno, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError(f"plan line {lineno}: expected key=value, got {text!r}")
        key, value = (part.strip() for part in text.split("=", 1))
        if key not in _PLAN_REQUIRED + _PLAN_OPTIONAL:
            raise ConfigError(f"plan line {lineno}: unknown key {key!r}")
        entries[key] = value
    missing = [k for k in _PLAN_REQUIRED if k not in entries]
    if missing:
        raise ConfigError(f"plan file missing required keys: {', '.join(missing)}")
    try:
        plan = ExperimentPlan(
            null_model=entries["null_model"],
            dgp_model=entries["dgp_model"],
            alpha1_grid=tuple(float(t) for t in entries["alpha1_grid"].split(",")),
            n_grid=tuple(int(t) for t in entries["n_grid"].split(",")),
            reps=int(entries["reps"]),
            method=entries["method"],
            B=int(entries.get("B", 99)),
            statistics=_parse_stats(entries["statistics"])
            if "statistics" in entries
            else ExperimentPlan.statistics,
            seed=int(entries["seed"]),
            burnin=int(entries.get("burnin", 500)),
        )
    except ValueError as exc:
        raise ConfigError(f"plan file value error: {exc}") from None
    model_from_id(plan.null_model)
    model_from_id(plan.dgp_model)
    return plan


def cmd_mc(args) -> int:
    plan = parse_plan(args.plan)
    table = run_experiment(plan, workers=args.workers)
    with open(args.out, "w", newline="") as fh:
        table.to_csv(fh)
    print(f"power table ({len(table.rows)} rows) written to {args.out}")
    return EXIT_OK


# ----------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pitspec",
        description="Specification tests for parametric conditional "
        "distributions of time series.",
    )
    parser.add_argument("--version", action="version", version=f"pitspec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, workers=True):
        p.add_argument("--B", type=int, default=999, help="bootstrap replicates")
        p.add_argument("--seed", type=int, default=0, help="master RNG seed")
        p.add_argument("--burnin", type=int, default=500, help="simulation burn-in")
        if workers:
            p.add_argument("--workers", type=int, default=1,
                           help="parallel bootstrap workers")

    p = sub.add_parser("test", help="bootstrap specification tests on a series")
    p.add_argument("data", help="CSV file with a returns column")
    p.add_argument("--model", required=True, help="model id (e.g. garch11-n)")
    p.add_argument("--stats", default=None,
                   help="comma list of statistic tokens "
                        "(default d1cvm,adj1,adj5,d1ks,mdj1,mdj5)")
    common(p)
    p.add_argument("--out", default="pitspec-test.json", help="JSON report path")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("autocorrelogram",
                       help="lagwise statistics with bootstrapped bands")
    p.add_argument("data")
    p.add_argument("--model", required=True)
    p.add_argument("--k", type=int, default=5, help="maximum lag")
    p.add_argument("--norm", default="cvm", help="cvm or ks")
    common(p)
    p.add_argument("--out", default="autocorrelogram",
                   help="output base path (.svg and .csv appended)")
    p.set_defaults(func=cmd_autocorrelogram)

    p = sub.add_parser("simulate", help="simulate a series from a model")
    p.add_argument("--model", required=True)
    p.add_argument("--params", required=True,
                   help="comma list in layout order, e.g. 0,0.1,0.1,0.8")
    p.add_argument("--n", type=int, default=1000, help="observations to keep")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--burnin", type=int, default=500)
    p.add_argument("--out", default="simulated.csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="maximum-likelihood fit with std errors")
    p.add_argument("data")
    p.add_argument("--model", required=True)
    p.add_argument("--out", default="estimate.json")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("mc", help="Monte Carlo size/power experiment")
    p.add_argument("plan", help="key=value plan file")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="mc.csv")
    p.set_defaults(func=cmd_mc)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, DegenerateSampleError) as exc:
        print(f"pitspec: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (FitError, LikelihoodError) as exc:
        print(f"pitspec: fit error: {exc}", file=sys.stderr)
        return EXIT_FIT
    except UnstableBootstrapError as exc:
        print(f"pitspec: bootstrap error: {exc}", file=sys.stderr)
        return EXIT_BOOTSTRAP
    except (ConfigError, StationarityError) as exc:
        print(f"pitspec: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PitspecError as exc:
        print(f"pitspec: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
