import math

import numpy as np
import pytest

from pitspec import _kernels_python
from pitspec import kernels

try:
    from pitspec import _ext

    HAS_EXTENSION = True
except ImportError:
    HAS_EXTENSION = False

BACKENDS = [_kernels_python] + ([_ext] if HAS_EXTENSION else [])
IDS = ["python"] + (["compiled"] if HAS_EXTENSION else [])


@pytest.fixture(params=BACKENDS, ids=IDS)
def backend(request):
    return request.param


PARAMS = [
    (0.0, 0.0, 0.1, 0.1, 0.8),
    (0.01, 0.3, 0.05, 0.15, 0.7),
    (-0.2, -0.6, 1.0, 0.0, 0.0),
]


def _series(rng, n=300):
    return rng.standard_normal(n).cumsum() * 0.01 + rng.standard_normal(n)


class TestFilter:
    @pytest.mark.parametrize("c,a1,omega,alpha,beta", PARAMS)
    def test_recursion_definition(self, backend, rng, c, a1, omega, alpha, beta):
        y = _series(rng, 50)
        mu, h2 = backend.garch_filter(y, c, a1, omega, alpha, beta)
        assert mu[0] == pytest.approx(c / (1.0 - a1))
        assert h2[0] == pytest.approx(omega / (1.0 - alpha - beta))
        for t in range(1, 50):
            assert mu[t] == pytest.approx(c + a1 * y[t - 1], abs=1e-12)
            e = y[t - 1] - mu[t - 1]
            assert h2[t] == pytest.approx(
                omega + alpha * e * e + beta * h2[t - 1], rel=1e-12
            )

    def test_backends_agree(self, rng):
        if not HAS_EXTENSION:
            pytest.skip("extension not built")
        y = _series(rng)
        for c, a1, omega, alpha, beta in PARAMS:
            mu_p, h2_p = _kernels_python.garch_filter(y, c, a1, omega, alpha, beta)
            mu_c, h2_c = _ext.garch_filter(y, c, a1, omega, alpha, beta)
            np.testing.assert_allclose(mu_p, mu_c, rtol=1e-12)
            np.testing.assert_allclose(h2_p, h2_c, rtol=1e-12)


class TestLoglik:
    @pytest.mark.parametrize("dist,df", [(0, 0.0), (1, 5.0), (2, 5.0)])
    @pytest.mark.parametrize("start", [0, 1])
    def test_backends_agree(self, rng, dist, df, start):
        if not HAS_EXTENSION:
            pytest.skip("extension not built")
        y = _series(rng)
        for c, a1, omega, alpha, beta in PARAMS:
            lp = _kernels_python.garch_loglik(y, c, a1, omega, alpha, beta,
                                              start, dist, df)
            lc = _ext.garch_loglik(y, c, a1, omega, alpha, beta, start, dist, df)
            assert lp == pytest.approx(lc, rel=1e-12)

    def test_matches_scipy_density(self, backend, rng):
        from scipy.stats import norm, t

        y = _series(rng, 120)
        c, a1, omega, alpha, beta = 0.02, 0.2, 0.08, 0.12, 0.75
        mu, h2 = _kernels_python.garch_filter(y, c, a1, omega, alpha, beta)
        z = (y - mu) / np.sqrt(h2)
        # normal
        want = float(np.sum(norm.logpdf(z) - 0.5 * np.log(h2)))
        got = backend.garch_loglik(y, c, a1, omega, alpha, beta, 0, 0, 0.0)
        assert got == pytest.approx(want, rel=1e-12)
        # unit-variance student-t(5)
        s = math.sqrt(3.0 / 5.0)
        want = float(np.sum(t.logpdf(z / s, 5) - math.log(s) - 0.5 * np.log(h2)))
        got = backend.garch_loglik(y, c, a1, omega, alpha, beta, 0, 1, 5.0)
        assert got == pytest.approx(want, rel=1e-12)
        # raw student-t(5), skipping the first observation
        want = float(np.sum((t.logpdf(z, 5) - 0.5 * np.log(h2))[1:]))
        got = backend.garch_loglik(y, c, a1, omega, alpha, beta, 1, 2, 5.0)
        assert got == pytest.approx(want, rel=1e-12)


class TestSimulate:
    def test_backends_agree(self, rng):
        if not HAS_EXTENSION:
            pytest.skip("extension not built")
        eps = rng.standard_normal(400)
        for c, a1, omega, alpha, beta in PARAMS:
            yp = _kernels_python.garch_simulate(eps, c, a1, omega, alpha, beta)
            yc = _ext.garch_simulate(eps, c, a1, omega, alpha, beta)
            np.testing.assert_allclose(yp, yc, rtol=1e-10, atol=1e-12)

    def test_simulation_consistent_with_filter(self, backend, rng):
        # filtering a simulated path at the same parameters recovers the
        # innovations (after the filter start)
        eps = rng.standard_normal(200)
        c, a1, omega, alpha, beta = 0.01, 0.4, 0.1, 0.1, 0.8
        y = backend.garch_simulate(eps, c, a1, omega, alpha, beta)
        mu, h2 = backend.garch_filter(y, c, a1, omega, alpha, beta)
        z = (y - mu) / np.sqrt(h2)
        np.testing.assert_allclose(z, eps, rtol=1e-8, atol=1e-10)


class TestCvmPairSum:
    def test_backends_agree(self, rng):
        if not HAS_EXTENSION:
            pytest.skip("extension not built")
        x, y = rng.random(777), rng.random(777)
        sp = _kernels_python.cvm_pair_sum(x, y)
        sc = _ext.cvm_pair_sum(x, y)
        assert sp == pytest.approx(sc, rel=1e-13)

    def test_exact_small(self, backend, rng):
        x, y = rng.random(40), rng.random(40)
        want = math.fsum(
            (1.0 - max(x[t], x[s])) * (1.0 - max(y[t], y[s]))
            for t in range(40)
            for s in range(40)
        )
        assert backend.cvm_pair_sum(x, y) == pytest.approx(want, rel=1e-13)


def test_dispatcher_exposes_active_backend():
    import os

    assert kernels.BACKEND in ("compiled", "python")
    assert "python" in kernels.available_backends()
    mod = kernels.get_backend("python")
    assert mod is _kernels_python
    if HAS_EXTENSION and not os.environ.get("PITSPEC_PURE_PYTHON"):
        assert kernels.BACKEND == "compiled"
        assert kernels.get_backend("compiled") is _ext
    with pytest.raises(ValueError):
        kernels.get_backend("weird")
