"""pitspec: specification tests for parametric conditional distributions
of time series, built on probability-integral-transform empirical
processes with exact Cramér-von Mises / Kolmogorov-Smirnov statistics
and a parametric bootstrap."""

__version__ = "0.1.0"

from .bootstrap import (
    BootstrapReport,
    StatisticSpec,
    decision,
    parametric_bootstrap,
)
from .errors import (
    ConfigError,
    DegenerateSampleError,
    FitError,
    InputError,
    InsufficientSampleError,
    LikelihoodError,
    PitspecError,
    StationarityError,
    UnstableBootstrapError,
)
from .estimation import FitResult, fit_ml
from .kernels import BACKEND as KERNEL_BACKEND
from .models import (
    MODEL_IDS,
    ConditionalModel,
    ParamVector,
    SeriesState,
    loglik,
    model_from_id,
    pit,
    simulate,
)
from .models import filter as model_filter
from .montecarlo import ExperimentPlan, PowerTable, run_experiment
from .process import (
    StatisticValue,
    UniformSequence,
    aggregate,
    cvm_lag,
    cvm_marginal,
    cvm_pwise,
    eval_v1,
    eval_v2_lag,
    eval_vp,
    ks_lag,
    ks_marginal,
    ks_pwise,
    limit_covariance,
    uniform_sequence,
)

__all__ = [
    "BootstrapReport",
    "ConditionalModel",
    "ConfigError",
    "DegenerateSampleError",
    "ExperimentPlan",
    "FitError",
    "FitResult",
    "InputError",
    "InsufficientSampleError",
    "KERNEL_BACKEND",
    "LikelihoodError",
    "MODEL_IDS",
    "ParamVector",
    "PitspecError",
    "PowerTable",
    "SeriesState",
    "StationarityError",
    "StatisticSpec",
    "StatisticValue",
    "UniformSequence",
    "UnstableBootstrapError",
    "aggregate",
    "cvm_lag",
    "cvm_marginal",
    "cvm_pwise",
    "decision",
    "eval_v1",
    "eval_v2_lag",
    "eval_vp",
    "fit_ml",
    "ks_lag",
    "ks_marginal",
    "ks_pwise",
    "limit_covariance",
    "loglik",
    "model_filter",
    "model_from_id",
    "parametric_bootstrap",
    "pit",
    "run_experiment",
    "simulate",
    "uniform_sequence",
]
