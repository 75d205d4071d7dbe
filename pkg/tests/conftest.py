import pytest

import kellipse as ke


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance-criterion PASS lines even under output capture."""
    try:
        from test_acceptance import ANNOUNCED
    except ImportError:
        return
    if ANNOUNCED:
        terminalreporter.section("acceptance criteria")
        for line in ANNOUNCED:
            terminalreporter.write_line(line)


@pytest.fixture
def line():
    """The real line with the usual metric."""
    return ke.Space.continuum(1, ke.Metric.l1())


@pytest.fixture
def plane_l1():
    return ke.Space.continuum(2, ke.Metric.l1())


@pytest.fixture
def plane_l2():
    return ke.Space.continuum(2, ke.Metric.l2())


@pytest.fixture
def line_ellipse(line):
    """The level set {x : |x+1| + |x| + |x-1| = 9} = {-3, 3}."""
    return ke.KEllipse(line, ((-1,), (0,), (1,)), 9)
