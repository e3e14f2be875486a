import numpy as np
import pytest

from periodic_bumps import Exponential, PeriodizedKernel, WizardHat, solutions

WH = WizardHat(4.0, 2.0, 1.5, 1.0)
WH_HIGH = WizardHat(3.0, 2.0, 1.4, 1.0)
EXP = Exponential(0.5, 1.0)


@pytest.fixture(scope="session")
def wizard_hat():
    return WH


@pytest.fixture(scope="session")
def wh_sols_32():
    """The three candidates of the wizard hat at T=3.2, h=0.4."""
    return solutions(PeriodizedKernel(WH, 3.2), 0.4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance") or sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.report_lines():
        terminalreporter.write_line(line)
