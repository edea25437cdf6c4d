"""Monte Carlo size/power experiments for the bootstrap tests.

A plan fixes a null model, a data-generating AR(1)-GARCH family with a
grid of mean-feedback coefficients, sample sizes, and a set of
statistics.  For each grid cell the experiment simulates ``reps``
datasets, tests the null on each, and records rejection frequencies.

Two critical-value methods are supported:

* ``warp``: one bootstrap replicate per dataset; the replicates pooled
  across datasets form the null reference distribution (fast, the
  default);
* ``full``: a complete ``B``-replicate bootstrap per dataset, rejecting
  by p-value.
"""

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bootstrap import (
    LEVELS,
    StatisticSpec,
    critical_value,
    parametric_bootstrap,
)
from .errors import ConfigError, PitspecError
from .estimation import fit_ml
from .models import ParamVector, model_from_id, pit, simulate

#: The benchmark mean-misspecification DGP grid.
DEFAULT_ALPHA1_GRID = tuple(round(x, 1) for x in np.arange(-0.8, 0.81, 0.2))

DEFAULT_STATISTICS = (
    StatisticSpec.parse("d1cvm"),
    StatisticSpec.parse("adj01"),
)


@dataclass(frozen=True)
class ExperimentPlan:
    """Configuration of one size/power experiment."""

    null_model: str = "garch11-n"
    dgp_model: str = "ar1-garch11-n"
    alpha1_grid: tuple = DEFAULT_ALPHA1_GRID
    n_grid: tuple = (100, 300)
    reps: int = 500
    method: str = "warp"
    B: int = 99
    statistics: tuple = DEFAULT_STATISTICS
    seed: int = 0
    burnin: int = 500
    levels: tuple = LEVELS
    dgp_mean_const: float = 0.0
    dgp_var_const: float = 0.1
    dgp_arch: float = 0.1
    dgp_garch: float = 0.8

    def __post_init__(self):
        if self.reps < 1:
            raise ConfigError("reps must be at least 1")
        if not self.alpha1_grid or not self.n_grid:
            raise ConfigError("grids must be nonempty")
        if self.method not in ("warp", "full"):
            raise ConfigError(f"unknown method: {self.method!r}")
        if not self.statistics:
            raise ConfigError("at least one statistic is required")

    def dgp_params(self, alpha1: float) -> ParamVector:
        ar1 = alpha1 if model_from_id(self.dgp_model).has_ar else None
        if ar1 is None and alpha1 != 0.0:
            raise ConfigError("nonzero alpha1 requires an AR dgp model")
        return ParamVector(
            self.dgp_mean_const,
            self.dgp_var_const,
            self.dgp_arch,
            self.dgp_garch,
            ar1=ar1,
        )


@dataclass(frozen=True)
class PowerRow:
    alpha1: float
    n: int
    statistic: str
    level: float
    rate: float
    reps: int
    method: str
    failures: int


@dataclass(frozen=True)
class PowerTable:
    rows: tuple

    CSV_HEADER = ("alpha1", "n", "statistic", "level", "rate", "reps", "method", "failures")

    def to_csv(self, fp) -> None:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(self.CSV_HEADER)
        for r in self.rows:
            writer.writerow(
                (
                    f"{r.alpha1:.10g}",
                    r.n,
                    r.statistic,
                    f"{r.level:.2f}",
                    f"{r.rate:.10g}",
                    r.reps,
                    r.method,
                    r.failures,
                )
            )

    def csv_text(self) -> str:
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()

    def rate_of(self, alpha1, n, statistic, level) -> float:
        for r in self.rows:
            if (
                r.alpha1 == alpha1
                and r.n == n
                and r.statistic == statistic
                and r.level == level
            ):
                return r.rate
        raise KeyError((alpha1, n, statistic, level))


def _warp_rep(args):
    """One warp-speed replication: observed statistics plus one
    bootstrapped statistic vector.  Returns None on any fit failure."""
    plan, cell_index, rep, alpha1, n = args
    null = model_from_id(plan.null_model)
    dgp = model_from_id(plan.dgp_model)
    data_stream = np.random.SeedSequence(
        entropy=plan.seed, spawn_key=(cell_index, rep, 0)
    )
    y = simulate(dgp, plan.dgp_params(alpha1), n, data_stream, burnin=plan.burnin)
    try:
        fit = fit_ml(null, y)
        if not fit.converged:
            return None
        u = pit(null, fit.params, y)
        observed = [s.compute(u) for s in plan.statistics]
        boot_stream = np.random.SeedSequence(
            entropy=plan.seed, spawn_key=(cell_index, rep, 1)
        )
        y_star = simulate(null, fit.params, n, boot_stream, burnin=plan.burnin)
        refit = fit_ml(null, y_star, init=fit.params)
        if not refit.converged:
            return None
        u_star = pit(null, refit.params, y_star)
        replicate = [s.compute(u_star) for s in plan.statistics]
    except PitspecError:
        return None
    return observed, replicate


def _full_rep(args):
    """One full-bootstrap replication: p-values per statistic, or None."""
    plan, cell_index, rep, alpha1, n = args
    null = model_from_id(plan.null_model)
    dgp = model_from_id(plan.dgp_model)
    data_stream = np.random.SeedSequence(
        entropy=plan.seed, spawn_key=(cell_index, rep, 0)
    )
    y = simulate(dgp, plan.dgp_params(alpha1), n, data_stream, burnin=plan.burnin)
    boot_seed = int(
        np.random.SeedSequence(
            entropy=plan.seed, spawn_key=(cell_index, rep, 1)
        ).generate_state(1)[0]
    )
    try:
        reports = parametric_bootstrap(
            null, y, plan.statistics, plan.B, boot_seed, burnin=plan.burnin
        )
    except PitspecError:
        return None
    return [r.p_value for r in reports]


def run_experiment(plan: ExperimentPlan, workers: int = 1) -> PowerTable:
    """Execute the plan and tabulate rejection rates per cell,
    statistic, and level."""
    rows = []
    cells = [(a1, n) for a1 in plan.alpha1_grid for n in plan.n_grid]
    for cell_index, (alpha1, n) in enumerate(cells):
        tasks = [(plan, cell_index, rep, alpha1, n) for rep in range(plan.reps)]
        runner = _warp_rep if plan.method == "warp" else _full_rep
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(runner, tasks, chunksize=1))
        else:
            results = [runner(t) for t in tasks]
        kept = [r for r in results if r is not None]
        failures = plan.reps - len(kept)
        rows.extend(
            _cell_rows(plan, alpha1, n, kept, failures)
        )
    return PowerTable(rows=tuple(rows))


def _cell_rows(plan, alpha1, n, kept, failures):
    rows = []
    for si, spec in enumerate(plan.statistics):
        for level in plan.levels:
            if not kept:
                rate = 0.0
            elif plan.method == "warp":
                observed = np.array([k[0][si] for k in kept])
                pooled = np.array([k[1][si] for k in kept])
                rate = float(np.mean(observed > critical_value(pooled, level)))
            else:
                pvals = np.array([k[si] for k in kept])
                rate = float(np.mean(pvals <= level))
            rows.append(
                PowerRow(
                    alpha1=alpha1,
                    n=n,
                    statistic=spec.label,
                    level=level,
                    rate=rate,
                    reps=plan.reps,
                    method=plan.method,
                    failures=failures,
                )
            )
    return rows
