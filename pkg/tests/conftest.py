import pytest

from hapsplan.scenario import default_scenario


@pytest.fixture(scope="session")
def base_scenario():
    return default_scenario()
