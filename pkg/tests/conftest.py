import os
import sys

# must happen before numba is first imported so the 8-worker checks can run
os.environ.setdefault("NUMBA_NUM_THREADS", "8")
sys.path.insert(0, os.path.dirname(__file__))

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from collmem import _jit  # noqa: E402

_ACCEPTANCE = []


@pytest.fixture(params=["numba", "numpy"])
def backend(request):
    if request.param == "numba" and not _jit.HAVE_NUMBA:
        pytest.skip("numba not installed")
    prev = _jit.set_backend(request.param)
    yield request.param
    _jit.set_backend(prev)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


class _Criterion:
    def __init__(self, name):
        self.name = name
        self.detail = ""
        self.ok = None

    def check(self, ok, detail=""):
        self.ok = bool(ok)
        self.detail = detail
        assert ok, f"{self.name}: {detail}"


@pytest.fixture
def criterion(request):
    c = _Criterion(request.node.name)
    yield c
    rep = getattr(request.node, "rep_call", None)
    if rep is not None and rep.skipped:
        status = "SKIP"
    elif rep is not None and rep.passed and c.ok is not False:
        status = "PASS"
    else:
        status = "FAIL"
    _ACCEPTANCE.append((request.node.name, status, c.detail))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{status}  {name}  {detail}")
