import pytest

from gwproj.virasoro import Engine


@pytest.fixture(scope="session")
def engine2():
    return Engine(2)


@pytest.fixture(scope="session")
def engine3():
    return Engine(3)
