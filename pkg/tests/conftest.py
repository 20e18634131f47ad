import pytest

from dkp5 import build_representation


@pytest.fixture(scope="session")
def exact_rep():
    return build_representation("exact")


@pytest.fixture(scope="session")
def float_rep():
    return build_representation("float")
