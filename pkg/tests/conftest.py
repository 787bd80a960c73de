import numpy as np
import pytest


def fd_step(v):
    return 1e-6 * np.maximum(1.0, np.abs(v))


def central_diff(fun, v, h=None):
    """Central difference of a scalar or vector function of a scalar."""
    h = fd_step(v) if h is None else h
    return (np.asarray(fun(v + h)) - np.asarray(fun(v - h))) / (2.0 * h)


def fd_gradient(fun, x):
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        h = fd_step(x[i])
        e[i] = h
        cols.append((np.asarray(fun(x + e)) - np.asarray(fun(x - e))) / (2.0 * h))
    return np.array(cols)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_criteria = {}


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None or (report.when != "call" and not (report.when == "setup" and report.outcome != "passed")):
        return
    n, title = marker
    if report.passed:
        outcome = "xpass" if hasattr(report, "wasxfail") else "pass"
    elif report.skipped and hasattr(report, "wasxfail"):
        outcome = "FAIL (expected)"
    else:
        outcome = "FAIL"
    _criteria.setdefault(n, []).append((title, outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        title = mark.kwargs.get("title", item.name)
        callspec = getattr(item, "callspec", None)
        if callspec is not None:
            title = f"{title} [{callspec.id}]"
        rep.criterion = (mark.args[0], title)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        for title, outcome in _criteria[n]:
            terminalreporter.write_line(f"criterion {n}: {outcome:<16} {title}")
