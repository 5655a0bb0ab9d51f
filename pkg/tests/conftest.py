import numpy as np
import pytest

from frechet_skew import dist, mirrored

_results = {}

CRITERIA = {
    1: "log-normal closed form nu_p",
    2: "log-normal(1/2, 1/2) anchors nu_0, nu_1, nu_2, nu_4",
    3: "cubic identity gamma = t^3 + 3t",
    4: "sign(gamma) = sign(nu_4 - nu_2)",
    5: "monotonicity certificates on the builtin families",
    6: "derivative formulas against finite differences",
    7: "dominance criteria coherence",
    8: "magnitude ell for log-normal",
    9: "limit of nu_p as p -> 0 for log-normal(0, 1)",
    10: "normal(0, 1) symmetric control",
    11: "tailbone sample p-means and direction",
    12: "byte-identical oracle-check artifacts",
}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_logreport(report):
    n = getattr(report, "criterion", None)
    if n is None:
        return
    if report.when == "call" or report.outcome != "passed":
        prev = _results.get(n, True)
        _results[n] = prev and report.outcome == "passed"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        rep.criterion = mark.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        if n in _results:
            status = "PASS" if _results[n] else "FAIL"
        else:
            status = "NOT RUN"
        terminalreporter.write_line(f"criterion {n:2d} {status}: {CRITERIA[n]}")


@pytest.fixture(scope="session")
def exp1():
    return dist("exponential", lam=1.0)


@pytest.fixture(scope="session")
def gamma21():
    return dist("gamma", alpha=2.0, lam=1.0)


@pytest.fixture(scope="session")
def beta25():
    return dist("beta", alpha=2.0, beta=5.0)


@pytest.fixture(scope="session")
def lognorm01():
    return dist("lognormal", mu=0.0, sigma2=1.0)


@pytest.fixture(scope="session")
def normal01():
    return dist("normal", mu=0.0, sigma2=1.0)


@pytest.fixture(scope="session")
def mirrored_gamma():
    return mirrored(dist("gamma", alpha=2.0, lam=1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
