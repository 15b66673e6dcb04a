import numpy as np
import pytest

from palsim.params import VehicleParams


@pytest.fixture(scope="session")
def params():
    return VehicleParams()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def calibration(params):
    """(coefficients, lateral samples, longitudinal samples, wall seconds) on the default car."""
    import time

    from palsim.fitting import calibrate

    start = time.perf_counter()
    coeffs, lateral, longitudinal = calibrate(params)
    return coeffs, lateral, longitudinal, time.perf_counter() - start


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
