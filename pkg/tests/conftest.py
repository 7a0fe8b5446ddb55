import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from ietlab.exact import ExactReal, quadratic_symbol

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ALPHA_SYM = quadratic_symbol("alpha", 2)
BETA_SYM = quadratic_symbol("beta", 3)
ALPHA = ExactReal(0, {ALPHA_SYM: 1})
BETA = ExactReal(0, {BETA_SYM: 1})
HALF = Fraction(1, 2)

ROOT = Path(__file__).resolve().parent.parent

ACCEPTANCE = {}
ACCEPTANCE_COLLECTED = False
N_CRITERIA = 10


@pytest.fixture(scope="session")
def alpha():
    return ALPHA


@pytest.fixture(scope="session")
def beta():
    return BETA


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE and not ACCEPTANCE_COLLECTED:
        return
    terminalreporter.section("acceptance criteria")
    for k in range(1, N_CRITERIA + 1):
        ok, detail = ACCEPTANCE.get(k, (False, "not completed (error, skip or deselected)"))
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
