"""Hot numeric kernels with two interchangeable backends.

``LORENTZLOX_BACKEND=numba`` (default when numba imports) uses the compiled
loops in ``_numba``; ``LORENTZLOX_BACKEND=numpy`` forces the vectorised
pure-numpy path in ``_numpy``. Both expose the same functions:

``eval_tape(ops, args, u)``
    value and first derivative of a compiled expression tape on an array.
``integrand(which, kind, c, eps, theta, branch, ops1, args1, opsn, argsn, u)``
    dv/du (``which=DVDU``) or curve speed (``which=SPEED``) along u.
``simpson_increments(..., knots, tol, max_depth)``
    adaptive Simpson integral of the integrand over each knot interval.
"""
import importlib
import os
import warnings

from ._numpy import DVDU, SPEED  # noqa: F401

ENV_VAR = "LORENTZLOX_BACKEND"
BACKENDS = ("numba", "numpy")


def load(name: str):
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; choose from {BACKENDS}")
    return importlib.import_module(f"._{name}", __name__)


def _default():
    requested = os.environ.get(ENV_VAR, "numba").strip().lower()
    if requested == "numpy":
        return load("numpy")
    try:
        return load("numba")
    except ImportError:
        if requested == "numba" and ENV_VAR in os.environ:
            warnings.warn("numba unavailable, falling back to the numpy backend")
        return load("numpy")


active = _default()


def use(name: str) -> None:
    """Switch the process-wide backend."""
    global active
    active = load(name)
