import importlib.util

import pytest
from hypothesis import settings

from lorentzlox import kernels

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

HAVE_NUMBA = importlib.util.find_spec("numba") is not None
BACKENDS = ["numpy", "numba"] if HAVE_NUMBA else ["numpy"]


@pytest.fixture(params=BACKENDS)
def backend(request):
    """Run the test once per kernel backend, restoring the previous one afterwards."""
    previous = kernels.active
    kernels.use(request.param)
    yield request.param
    kernels.active = previous


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(results[k])
