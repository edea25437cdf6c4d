"""Parametric bootstrap for the PIT-process statistics.

The procedure: fit the model, compute the observed statistic from the
fitted PITs, then repeatedly (simulate a same-length series at the
fitted parameters, refit, recompute the statistic).  The replicate
distribution yields finite-sample p-values, ``(1 + #{replicates >=
observed}) / (B + 1)``, and upper-quantile critical values.  Replicates
whose refit fails are dropped and counted; more than 20% failures is an
error.

Replicate b draws from its own RNG stream split off the master seed, so
results do not depend on execution order or worker count.
"""

import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import process
from .errors import ConfigError, FitError, PitspecError, UnstableBootstrapError
from .estimation import fit_ml
from .models import ConditionalModel, ParamVector, pit, simulate

LEVELS = (0.10, 0.05, 0.01)

_TOKEN_AGG = re.compile(r"^(adj|mdj)(0?)(\d+)$")
_TOKEN_LAG = re.compile(r"^(cvm|ks)lag(\d+)$")
_TOKEN_PW = re.compile(r"^(cvm|ks)p(\d+)$")


@dataclass(frozen=True)
class StatisticSpec:
    """Identifies one test statistic (norm, process scope, lag order)."""

    kind: str  # "cvm" | "ks"
    scope: str  # "marginal" | "lag" | "pwise" | "adj" | "mdj" | "adj0" | "mdj0"
    param: int | None = None

    def __post_init__(self):
        if self.kind not in ("cvm", "ks"):
            raise ConfigError(f"unknown statistic kind: {self.kind!r}")
        if self.scope == "marginal":
            if self.param is not None:
                raise ConfigError("marginal statistics take no lag parameter")
        elif self.scope in ("lag", "pwise", "adj", "mdj", "adj0", "mdj0"):
            if self.param is None or self.param < 1:
                raise ConfigError(f"{self.scope} statistics need a positive order")
        else:
            raise ConfigError(f"unknown statistic scope: {self.scope!r}")
        expected = "ks" if self.scope in ("mdj", "mdj0") else "cvm"
        if self.scope in ("adj", "adj0", "mdj", "mdj0") and self.kind != expected:
            raise ConfigError(f"{self.scope} statistics have kind {expected!r}")

    def compute(self, u) -> float:
        """Evaluate this statistic on a uniform sequence."""
        if self.scope == "marginal":
            f = process.cvm_marginal if self.kind == "cvm" else process.ks_marginal
            return f(u).value
        if self.scope == "lag":
            f = process.cvm_lag if self.kind == "cvm" else process.ks_lag
            return f(u, self.param).value
        if self.scope == "pwise":
            f = process.cvm_pwise if self.kind == "cvm" else process.ks_pwise
            return f(u, self.param).value
        return process.aggregate(u, self.param, self.scope).value

    @property
    def label(self) -> str:
        if self.scope == "marginal":
            return "D1n-CvM" if self.kind == "cvm" else "D1n-KS"
        if self.scope == "lag":
            return f"{'CvM' if self.kind == 'cvm' else 'KS'}-lag{self.param}"
        if self.scope == "pwise":
            return f"{'CvM' if self.kind == 'cvm' else 'KS'}-p{self.param}"
        base = self.scope[:3].upper()
        if self.scope.endswith("0"):
            return f"{base}0({self.param})"
        return f"{base}{self.param}"

    @classmethod
    def parse(cls, token: str) -> "StatisticSpec":
        """Parse a statistic token: d1cvm, d1ks, adjK, mdjK, adj0K,
        mdj0K, cvmlagJ, kslagJ, cvmpP, kspP."""
        tok = token.strip().lower()
        if tok == "d1cvm":
            return cls("cvm", "marginal")
        if tok == "d1ks":
            return cls("ks", "marginal")
        if m := _TOKEN_AGG.match(tok):
            scope = m.group(1) + ("0" if m.group(2) else "")
            kind = "ks" if m.group(1) == "mdj" else "cvm"
            return cls(kind, scope, int(m.group(3)))
        if m := _TOKEN_LAG.match(tok):
            return cls(m.group(1), "lag", int(m.group(2)))
        if m := _TOKEN_PW.match(tok):
            return cls(m.group(1), "pwise", int(m.group(2)))
        raise ConfigError(f"unknown statistic: {token!r}")


#: The report-table default column set.
DEFAULT_SPECS = tuple(
    StatisticSpec.parse(t) for t in ("d1cvm", "adj1", "adj5", "d1ks", "mdj1", "mdj5")
)


@dataclass(frozen=True)
class BootstrapReport:
    """Observed statistic, replicate distribution, and decisions."""

    spec: StatisticSpec
    observed: float
    replicates: np.ndarray
    p_value: float
    critical_values: dict[float, float]
    B: int
    seed: int
    n_failed: int = 0


def critical_value(replicates, level: float) -> float:
    """Upper empirical quantile: the k-th largest replicate with
    ``k = floor(level * (B + 1))``; +inf when B is too small for the
    level."""
    reps = np.sort(np.asarray(replicates, dtype=np.float64))[::-1]
    k = int(math.floor(level * (reps.shape[0] + 1)))
    if k < 1:
        return math.inf
    return float(reps[k - 1])


def _finite_p_value(observed, replicates) -> float:
    b = replicates.shape[0]
    return (1.0 + float(np.count_nonzero(replicates >= observed))) / (b + 1.0)


def _replicate_statistics(model, params, n, specs, seed, b, burnin):
    """One bootstrap replicate; returns the statistic values or None on
    a failed refit."""
    stream = np.random.SeedSequence(entropy=seed, spawn_key=(b,))
    y_star = simulate(model, params, n, stream, burnin=burnin)
    try:
        refit = fit_ml(model, y_star, init=params)
    except PitspecError:
        return None
    if not refit.converged:
        return None
    u_star = pit(model, refit.params, y_star)
    return [spec.compute(u_star) for spec in specs]


def _replicate_task(args):
    return _replicate_statistics(*args)


def parametric_bootstrap(
    model: ConditionalModel,
    y,
    spec,
    B: int,
    seed: int,
    *,
    burnin: int = 500,
    workers: int = 1,
    levels=LEVELS,
):
    """Run the bootstrap test; ``spec`` may be a single
    :class:`StatisticSpec` or a sequence (sharing one replicate loop).

    Returns a :class:`BootstrapReport` (or a list of them, matching the
    input shape).
    """
    single = isinstance(spec, StatisticSpec)
    specs = (spec,) if single else tuple(spec)
    if not specs:
        raise ValueError("at least one statistic is required")
    if B < 1:
        raise ValueError("B must be at least 1")
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]

    fit = fit_ml(model, y)
    if not fit.converged:
        raise FitError("fit failure on original data")
    u = pit(model, fit.params, y)
    observed = [s.compute(u) for s in specs]

    tasks = [(model, fit.params, n, specs, seed, b, burnin) for b in range(B)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_replicate_task, tasks, chunksize=8))
    else:
        results = [_replicate_task(t) for t in tasks]

    kept = [r for r in results if r is not None]
    n_failed = B - len(kept)
    if n_failed > 0.2 * B or not kept:
        raise UnstableBootstrapError(
            f"unstable bootstrap: {n_failed} of {B} replicate refits failed"
        )
    matrix = np.asarray(kept, dtype=np.float64)

    reports = []
    for i, s in enumerate(specs):
        reps = matrix[:, i]
        reports.append(
            BootstrapReport(
                spec=s,
                observed=observed[i],
                replicates=reps,
                p_value=_finite_p_value(observed[i], reps),
                critical_values={lv: critical_value(reps, lv) for lv in levels},
                B=reps.shape[0],
                seed=seed,
                n_failed=n_failed,
            )
        )
    return reports[0] if single else reports


def decision(report: BootstrapReport, level: float) -> bool:
    """True iff the observed statistic exceeds the critical value."""
    if level not in report.critical_values:
        raise ConfigError(f"unsupported level: {level!r}")
    return report.observed > report.critical_values[level]


def significance_stars(p_value: float) -> str:
    """Table annotation: *** at 1%, ** at 5%, * at 10%."""
    if p_value <= 0.01:
        return "***"
    if p_value <= 0.05:
        return "**"
    if p_value <= 0.10:
        return "*"
    return ""
