import networkx as nx
import pytest

from expanders.cayley_lps import build_lps
from expanders.graph_core import build, from_networkx


def cycle(n):
    return build(n, 2, [(i, (i + 1) % n) for i in range(n)])


@pytest.fixture(scope="session")
def petersen():
    return from_networkx(nx.petersen_graph())


@pytest.fixture(scope="session")
def c8():
    return cycle(8)


@pytest.fixture(scope="session")
def k6():
    return from_networkx(nx.complete_graph(6))


@pytest.fixture(scope="session")
def lps_13_17():
    return build_lps(13, 17)


@pytest.fixture(scope="session")
def lps_5_29():
    return build_lps(5, 29)
