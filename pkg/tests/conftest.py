import pytest
from hypothesis import strategies as st

from gwlocal.offspring import OffspringDistribution
from gwlocal.trees import Tree


@pytest.fixture(scope="session")
def binary():
    return OffspringDistribution.binary(0.5)


@pytest.fixture(scope="session")
def geometric():
    return OffspringDistribution.geometric_mixture(0.5)


@pytest.fixture(scope="session")
def subcritical():
    return OffspringDistribution.binary(0.6)


@st.composite
def trees(draw, max_nodes=25, max_degree=4):
    """Random valid Lukasiewicz words, grown until the slot count hits zero."""
    degrees = []
    slots = 1
    while slots > 0:
        room = max_nodes - len(degrees) - slots
        k = draw(st.integers(0, max(0, min(max_degree, room))))
        degrees.append(k)
        slots += k - 1
    return Tree(tuple(degrees))


ACCEPTANCE = []


@pytest.fixture(scope="session")
def verdict():
    """Record one acceptance line; the test still asserts on its own."""
    def record(criterion: int, ok: bool, detail: str):
        ACCEPTANCE.append((criterion, ok, detail))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {criterion:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
