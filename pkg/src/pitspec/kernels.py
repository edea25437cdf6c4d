"""Backend dispatch for the hot kernels.

Prefers the compiled extension and falls back to the numpy
implementations when the extension was not built (or when
``PITSPEC_PURE_PYTHON`` is set in the environment).  ``BACKEND``
records which one is active; both backends are importable directly for
equivalence tests and benchmarks.
"""

import os

from . import _kernels_python

if os.environ.get("PITSPEC_PURE_PYTHON"):
    _impl = _kernels_python
    BACKEND = "python"
else:
    try:
        from . import _ext as _impl

        BACKEND = "compiled"
    except ImportError:  # extension not built
        _impl = _kernels_python
        BACKEND = "python"

garch_filter = _impl.garch_filter
garch_loglik = _impl.garch_loglik
garch_simulate = _impl.garch_simulate
cvm_pair_sum = _impl.cvm_pair_sum


def available_backends():
    """Names of the kernel backends importable in this installation."""
    names = ["python"]
    if BACKEND == "compiled":
        names.insert(0, "compiled")
    return names


def get_backend(name):
    """Return the kernel module for ``name`` ("compiled" or "python")."""
    if name == "python":
        return _kernels_python
    if name == "compiled":
        if BACKEND != "compiled":
            raise ImportError("compiled kernel extension is not available")
        return _impl
    raise ValueError(f"unknown kernel backend: {name!r}")
