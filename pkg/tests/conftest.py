import pytest

from tailcomb.fixtures import fixture


@pytest.fixture(scope="session")
def G1():
    return fixture("G1")


@pytest.fixture(scope="session")
def G2():
    return fixture("G2")


@pytest.fixture(scope="session")
def G3():
    return fixture("G3")


@pytest.fixture(scope="session")
def G4():
    return fixture("G4")


def sc(G, *names):
    """Subcurve mask from component names."""
    return G.subcurve(names)


def tset(G, mask):
    return set(G.names_of(mask))
