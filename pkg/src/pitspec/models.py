"""Conditional location-scale models: GARCH(1,1) and AR(1)-GARCH(1,1).

A model specifies ``y_t = mu_t + sigma_t * eps_t`` with iid unit-variance
innovations; its conditional CDF evaluated at the data yields the
probability integral transforms consumed by :mod:`pitspec.process`.

Filtering uses truncated information with unconditional-moment
initializers: ``mu_1`` is the model's unconditional mean and ``h2_1``
the unconditional variance ``omega / (1 - alpha - beta)``.  With this
convention AR(1)-GARCH at ``ar1 = 0`` reproduces the GARCH filter
exactly; the AR(1) PIT sequence still starts at t=2, where the first
lag-based mean is available.

Student-t innovations are variance-standardized by default (scaled by
``sqrt((df-2)/df)``); construct :class:`ConditionalModel` with
``standardized_t=False`` for the raw-t variant.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri, stdtr, stdtrit

from . import kernels
from .errors import (
    ConfigError,
    DegenerateSampleError,
    LikelihoodError,
    StationarityError,
)
from .process import CLAMP_EPS, UniformSequence, uniform_sequence

_FAMILIES = ("garch11", "ar1-garch11")
_INNOVATIONS = ("normal", "t")


@dataclass(frozen=True)
class ConditionalModel:
    """A parametric family identifier plus its innovation law."""

    family: str
    innovation: str
    df: float = 5.0
    standardized_t: bool = True

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ConfigError(f"unknown model family: {self.family!r}")
        if self.innovation not in _INNOVATIONS:
            raise ConfigError(f"unknown innovation: {self.innovation!r}")
        if self.innovation == "t" and not self.df > 2.0:
            raise ConfigError("Student-t innovations require df > 2")

    @property
    def has_ar(self) -> bool:
        return self.family == "ar1-garch11"

    @property
    def mean_order(self) -> int:
        return 1 if self.has_ar else 0

    @property
    def _dist_code(self) -> int:
        if self.innovation == "normal":
            return 0
        return 1 if self.standardized_t else 2

    @property
    def _t_scale(self) -> float:
        return math.sqrt((self.df - 2.0) / self.df) if self.standardized_t else 1.0

    def innovation_cdf(self, x):
        """CDF of the innovation law, vectorized."""
        if self.innovation == "normal":
            return ndtr(x)
        return stdtr(self.df, np.asarray(x) / self._t_scale)

    def innovation_ppf(self, q):
        """Inverse CDF of the innovation law, vectorized."""
        if self.innovation == "normal":
            return ndtri(q)
        return stdtrit(self.df, q) * self._t_scale

    def param_layout(self):
        """Parameter names with their constraint classes, in fit order."""
        layout = [("mean_const", "free")]
        if self.has_ar:
            layout.append(("ar1", "free"))
        layout += [
            ("var_const", "positive"),
            ("arch", "simplex"),
            ("garch", "simplex"),
        ]
        return tuple(layout)


#: Model identifiers accepted by the CLI.
MODEL_IDS = {
    "garch11-n": ConditionalModel("garch11", "normal"),
    "garch11-t5": ConditionalModel("garch11", "t", df=5.0),
    "ar1-garch11-n": ConditionalModel("ar1-garch11", "normal"),
    "ar1-garch11-t5": ConditionalModel("ar1-garch11", "t", df=5.0),
}


def model_from_id(model_id: str) -> ConditionalModel:
    try:
        return MODEL_IDS[model_id]
    except KeyError:
        raise ConfigError(f"unknown model: {model_id!r}") from None


@dataclass(frozen=True)
class ParamVector:
    """Model parameters.  ``ar1`` must be present iff the model has an
    autoregressive mean."""

    mean_const: float
    var_const: float
    arch: float
    garch: float
    ar1: float | None = None

    def validate(self, model: ConditionalModel) -> None:
        if model.has_ar != (self.ar1 is not None):
            raise ValueError("ar1 coefficient does not match the model family")
        if not self.var_const > 0.0:
            raise ValueError("variance constant must be positive")
        if self.arch < 0.0 or self.garch < 0.0:
            raise ValueError("arch and garch coefficients must be nonnegative")
        if not self.arch + self.garch < 1.0:
            raise StationarityError("stationarity violated: arch + garch >= 1")
        if self.ar1 is not None and not abs(self.ar1) < 1.0:
            raise StationarityError("stationarity violated: |ar1| >= 1")

    def as_array(self, model: ConditionalModel) -> np.ndarray:
        vals = {name: getattr(self, name) for name, _ in model.param_layout()}
        return np.array([vals[name] for name, _ in model.param_layout()])

    @staticmethod
    def from_array(model: ConditionalModel, values) -> "ParamVector":
        names = [name for name, _ in model.param_layout()]
        kwargs = dict(zip(names, (float(v) for v in values)))
        return ParamVector(**kwargs)

    @property
    def _ar1_or_zero(self) -> float:
        return 0.0 if self.ar1 is None else self.ar1


@dataclass(frozen=True)
class SeriesState:
    """Filtered conditional means and variances for an observed series.

    ``start`` is the first usable (0-based) index; earlier entries rely
    on the presample initializers.
    """

    y: np.ndarray
    mu: np.ndarray
    h2: np.ndarray
    start: int


def _check_series(model, params, y):
    params.validate(model)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if y.ndim != 1:
        raise ValueError("series must be one-dimensional")
    if y.shape[0] < model.mean_order + 1:
        raise DegenerateSampleError("degenerate sample: series too short")
    if not np.all(np.isfinite(y)):
        raise ValueError("series must be finite")
    return y


def filter(model: ConditionalModel, params: ParamVector, y) -> SeriesState:
    """Run the conditional mean/variance recursion over ``y``."""
    y = _check_series(model, params, y)
    mu, h2 = kernels.garch_filter(
        y,
        params.mean_const,
        params._ar1_or_zero,
        params.var_const,
        params.arch,
        params.garch,
    )
    return SeriesState(y=y, mu=mu, h2=h2, start=model.mean_order)


def pit(model: ConditionalModel, params: ParamVector, y) -> UniformSequence:
    """Probability integral transforms of ``y`` under the model.

    For AR(1) models the sequence starts at t=2 and is one shorter than
    the series.
    """
    state = filter(model, params, y)
    sl = slice(state.start, None)
    z = (state.y[sl] - state.mu[sl]) / np.sqrt(state.h2[sl])
    return uniform_sequence(model.innovation_cdf(z))


def loglik(model: ConditionalModel, params: ParamVector, y) -> float:
    """Total log-likelihood of ``y`` over the usable range."""
    y = _check_series(model, params, y)
    value = kernels.garch_loglik(
        y,
        params.mean_const,
        params._ar1_or_zero,
        params.var_const,
        params.arch,
        params.garch,
        model.mean_order,
        model._dist_code,
        model.df,
    )
    if not math.isfinite(value):
        raise LikelihoodError("likelihood overflow")
    return value


def simulate(
    model: ConditionalModel,
    params: ParamVector,
    n: int,
    seed,
    burnin: int = 500,
) -> np.ndarray:
    """Simulate ``n`` observations from the model.

    Innovations are drawn by inverse CDF from a seeded uniform stream;
    ``burnin`` extra steps are discarded from the front.  Deterministic
    given ``(seed, n, burnin)``.
    """
    params.validate(model)
    if n < 1:
        raise ValueError("n must be at least 1")
    if burnin < 0:
        raise ValueError("burnin must be nonnegative")
    rng = np.random.default_rng(seed)
    q = rng.random(burnin + n)
    np.clip(q, CLAMP_EPS, 1.0 - CLAMP_EPS, out=q)
    eps = model.innovation_ppf(q)
    path = kernels.garch_simulate(
        eps,
        params.mean_const,
        params._ar1_or_zero,
        params.var_const,
        params.arch,
        params.garch,
    )
    return path[burnin:]
