import numpy as np
import pytest

from thurston4.groups import make_spec
from thurston4.metrics import random_params

KINDS = ("sol40", "sol4mn", "sol41", "nil4")

DEFAULT_SPECS = {
    "sol40": {},
    "sol4mn": {"m": 5, "n": 6},
    "sol41": {},
    "nil4": {},
}


@pytest.fixture(params=KINDS)
def spec(request):
    return make_spec(request.param, **DEFAULT_SPECS[request.param])


@pytest.fixture(params=KINDS)
def random_spec(request):
    rng = np.random.default_rng(100 + KINDS.index(request.param))
    return make_spec(request.param, **random_params(request.param, rng))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(module, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
