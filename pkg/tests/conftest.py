import pytest

from semiqnet.network import load_network
from importlib import resources


def _fixture(name: str):
    return load_network(str(resources.files("semiqnet") / "fixtures" / f"{name}.json"))


@pytest.fixture(scope="session")
def fig2():
    return _fixture("fig2")


@pytest.fixture(scope="session")
def fig5():
    return _fixture("fig5")


@pytest.fixture(scope="session")
def fig6():
    return _fixture("fig6")
