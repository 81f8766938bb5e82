import pytest

from arith_ae.sieve import build_spf


@pytest.fixture(scope="session")
def table4():
    return build_spf(10**4)


@pytest.fixture(scope="session")
def table5():
    return build_spf(10**5)


@pytest.fixture(scope="session")
def table6():
    return build_spf(10**6)
