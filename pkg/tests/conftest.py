import pytest

from selfsim.presets import (cuntz_system, grigorchuk_system,
                             katsura_example_system)


@pytest.fixture(scope="session")
def grig():
    return grigorchuk_system()


@pytest.fixture(scope="session")
def katsura():
    return katsura_example_system()


@pytest.fixture(scope="session")
def cuntz3():
    return cuntz_system(3)
