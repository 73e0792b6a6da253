import numpy as np
import pytest

from semiflow.series import PowerSeries

_ACCEPTANCE = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _ACCEPTANCE.append((marker.args[0], marker.args[1], rep.passed))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, ok in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def series_close(f: PowerSeries, g, atol):
    g = g.coeffs if isinstance(g, PowerSeries) else np.asarray(g, dtype=complex)
    n = min(f.coeffs.size, g.size)
    return float(np.max(np.abs(f.coeffs[:n] - g[:n]))) <= atol
