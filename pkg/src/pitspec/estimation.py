"""Maximum-likelihood fitting of the shipped models.

The optimizer works on an unconstrained reparameterization: mean terms
are free, the variance constant is log-transformed, and (arch, garch)
are mapped through a softmax onto the open simplex ``arch + garch < 1``,
so every point the simplex search visits is strictly feasible.  Search
is scipy's Nelder-Mead with seeded random restarts; warm starts (an
explicit ``init``) skip the restarts unless the first run fails to
converge.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .errors import DegenerateSampleError
from .models import ConditionalModel, ParamVector

#: Objective value substituted for nonfinite log-likelihoods.
_PENALTY = 1e10

#: Documented practical floor for ML fitting.
MIN_FIT_LENGTH = 30

_NM_OPTIONS = {"xatol": 1e-7, "fatol": 1e-8, "maxiter": 4000, "maxfev": 4000}


@dataclass(frozen=True)
class FitResult:
    """Outcome of :func:`fit_ml`.

    ``converged`` guarantees the returned parameters are strictly
    feasible; ``std_errors`` (natural scale, fit order) is filled only
    when requested.
    """

    params: ParamVector
    loglik_at_opt: float
    converged: bool
    iterations: int
    std_errors: np.ndarray | None = None


def transform(model: ConditionalModel, params: ParamVector) -> np.ndarray:
    """Map parameters to the unconstrained fitting scale."""
    free = []
    for name, constraint in model.param_layout():
        value = getattr(params, name)
        if constraint == "free":
            free.append(value)
        elif constraint == "positive":
            free.append(math.log(value))
    d = 1.0 - params.arch - params.garch
    free.append(math.log(params.arch) - math.log(d))
    free.append(math.log(params.garch) - math.log(d))
    return np.array(free)


def inverse_transform(model: ConditionalModel, phi) -> ParamVector:
    """Map a point on the fitting scale back to parameters."""
    phi = np.asarray(phi, dtype=np.float64)
    values = {}
    i = 0
    for name, constraint in model.param_layout():
        if constraint == "free":
            values[name] = float(phi[i])
            i += 1
        elif constraint == "positive":
            values[name] = math.exp(min(max(float(phi[i]), -700.0), 700.0))
            i += 1
    # clipping keeps every softmax weight strictly inside (0, 1) even
    # when the search wanders far out
    a = min(max(float(phi[i]), -30.0), 30.0)
    b = min(max(float(phi[i + 1]), -30.0), 30.0)
    # softmax with all exponents <= 0: immune to overflow
    m = max(0.0, a, b)
    e0, ea, eb = math.exp(-m), math.exp(a - m), math.exp(b - m)
    denom = e0 + ea + eb
    values["arch"] = ea / denom
    values["garch"] = eb / denom
    return ParamVector(**values)


def default_init(model: ConditionalModel, y) -> ParamVector:
    """Warm start: least-squares mean terms, variance triple
    ``(0.05 * var(y), 0.1, 0.8)``."""
    y = np.asarray(y, dtype=np.float64)
    var = float(np.var(y))
    if var <= 0.0 or float(np.min(y)) == float(np.max(y)):
        raise DegenerateSampleError("degenerate sample: zero variance")
    if model.has_ar:
        x, z = y[:-1], y[1:]
        vx = float(np.var(x))
        ar1 = float(np.cov(x, z, bias=True)[0, 1] / vx) if vx > 0 else 0.0
        ar1 = min(max(ar1, -0.98), 0.98)
        c = float(np.mean(z) - ar1 * np.mean(x))
        return ParamVector(c, 0.05 * var, 0.1, 0.8, ar1=ar1)
    return ParamVector(float(np.mean(y)), 0.05 * var, 0.1, 0.8)


def _objective(model, y):
    start = model.mean_order
    dist = model._dist_code
    df = model.df

    def neg_loglik(phi):
        p = inverse_transform(model, phi)
        ll = kernels.garch_loglik(
            y, p.mean_const, p._ar1_or_zero, p.var_const, p.arch, p.garch,
            start, dist, df,
        )
        return -ll if math.isfinite(ll) else _PENALTY

    return neg_loglik


def fit_ml(
    model: ConditionalModel,
    y,
    init: ParamVector | None = None,
    *,
    seed: int = 0,
    restarts: int = 3,
    compute_std_errors: bool = False,
) -> FitResult:
    """Fit ``model`` to ``y`` by maximum likelihood.

    The returned log-likelihood is never worse than at ``init`` (when
    given).  Deterministic given ``(y, init, seed)``.
    """
    y = np.ascontiguousarray(y, dtype=np.float64)
    if y.shape[0] < MIN_FIT_LENGTH:
        raise DegenerateSampleError(
            f"degenerate sample: need at least {MIN_FIT_LENGTH} observations"
        )
    warm = init is not None
    if init is None:
        init = default_init(model, y)
    else:
        init.validate(model)
    fun = _objective(model, y)
    phi0 = transform(model, init)

    best_phi = phi0
    best_f = fun(phi0)
    best_success = False
    iterations = 0

    def run(phi_start):
        nonlocal best_phi, best_f, best_success, iterations
        res = minimize(fun, phi_start, method="Nelder-Mead", options=_NM_OPTIONS)
        iterations += int(res.nit)
        if res.fun < best_f:
            best_phi, best_f, best_success = res.x, float(res.fun), bool(res.success)
        elif res.fun == best_f and res.success:
            best_success = True

    run(phi0)
    if not (warm and best_success):
        rng = np.random.default_rng(seed)
        for _ in range(restarts):
            step = rng.normal(0.0, 0.25, size=phi0.shape[0])
            run(best_phi + step * (1.0 + np.abs(best_phi)))

    params = inverse_transform(model, best_phi)
    converged = best_success and best_f < _PENALTY
    try:
        params.validate(model)
    except Exception:
        converged = False
    std_errors = None
    if compute_std_errors and converged:
        std_errors = _delta_method_se(model, fun, best_phi)
    return FitResult(
        params=params,
        loglik_at_opt=-best_f,
        converged=converged,
        iterations=iterations,
        std_errors=std_errors,
    )


def _delta_method_se(model, neg_loglik, phi):
    """Standard errors: central-difference Hessian of the log-likelihood
    on the fitting scale, mapped to the natural scale."""
    dim = phi.shape[0]
    h = 1e-4 * (1.0 + np.abs(phi))
    hess = np.empty((dim, dim))
    for i in range(dim):
        for j in range(i, dim):
            ei = np.zeros(dim)
            ej = np.zeros(dim)
            ei[i] = h[i]
            ej[j] = h[j]
            f = (
                neg_loglik(phi + ei + ej)
                - neg_loglik(phi + ei - ej)
                - neg_loglik(phi - ei + ej)
                + neg_loglik(phi - ei - ej)
            )
            hess[i, j] = hess[j, i] = f / (4.0 * h[i] * h[j])
    try:
        cov_free = np.linalg.inv(hess)
    except np.linalg.LinAlgError:
        return None
    jac = _numerical_jacobian(model, phi)
    cov_nat = jac @ cov_free @ jac.T
    diag = np.diag(cov_nat).copy()
    diag[diag < 0.0] = np.nan
    return np.sqrt(diag)


def _numerical_jacobian(model, phi, step=1e-6):
    dim = phi.shape[0]
    cols = []
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = step * (1.0 + abs(phi[i]))
        hi = inverse_transform(model, phi + e).as_array(model)
        lo = inverse_transform(model, phi - e).as_array(model)
        cols.append((hi - lo) / (2.0 * e[i]))
    return np.stack(cols, axis=1)
