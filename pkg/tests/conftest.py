import numpy as np
import pytest

from mimowpt.channel import cscg, dbm_to_watts, make_rng
from mimowpt.rectenna import RectennaParams, make_coefficients

# 36 dBm transmit power through 66 dB path loss
P_CAL = dbm_to_watts(36.0)
VAR_CAL = 10.0 ** (-6.6)
R_LOAD = 5000.0


@pytest.fixture(scope="session")
def coeffs():
    return make_coefficients(RectennaParams())


@pytest.fixture(scope="session")
def coeffs_unit_load():
    return make_coefficients(RectennaParams(r_load=1.0))


def random_channel(seed, q, m, variance=VAR_CAL):
    return cscg(make_rng(9000, seed), (q, m), variance)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# Acceptance verdicts, printed after the run so they show up without -s.
GATE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if GATE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(GATE_LINES):
            terminalreporter.write_line(line)
