import pytest

from landau_clusters import GaussianSpec, make_gaussian, make_mixture


@pytest.fixture(scope="session")
def unit_gaussian():
    return make_gaussian(GaussianSpec())


@pytest.fixture(scope="session")
def off_center_mixture():
    """Two Gaussians, neither centred at the origin."""
    return make_mixture([GaussianSpec((0.5, -0.3), 1.0, 1.0), GaussianSpec((-0.4, 0.6), 2.0, -0.5)])


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
