import pytest

from quadmix.maps import Quadrangulation, validate_map
from quadmix.trees import enumerate_quadrangulations, quadrangulations_from_codes


def path_map():
    # v0 - v1 - v2; dart 0 leaves v0, 1 and 2 leave v1, 3 leaves v2
    return validate_map(4, [1, 0, 3, 2], [0, 2, 1, 3], 0)


@pytest.fixture
def path_quad():
    return Quadrangulation(path_map())


@pytest.fixture(scope="session")
def enumerated():
    """All rooted quadrangulations with 1..4 faces, keyed by face count."""
    return {n: quadrangulations_from_codes(enumerate_quadrangulations(n)) for n in range(1, 5)}


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS, key=lambda k: (len(k), k)):
        terminalreporter.write_line(RESULTS[key])
