import numpy as np
import pytest

from lindri.model import ThermalAncilla, build_heisenberg, site_interactions
from lindri.rimap import RIConfig


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def appendix_c_config(t=0.01, nu=10, **kw):
    """Four-site dissipative Heisenberg chain with b = 0.5, beta = 1, omega = 0.1."""
    h0 = build_heisenberg(4, 0.5)
    baths = [(ThermalAncilla(1.0, 0.1), inter) for inter in site_interactions(4)]
    return RIConfig(h0, baths, t=t, nu=nu, **kw)


@pytest.fixture
def appc():
    return appendix_c_config()


# one (criterion, passed, detail) entry per acceptance check, echoed after the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
