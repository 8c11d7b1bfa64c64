import pytest

from swipt_twr.model import default_config


@pytest.fixture
def cfg():
    return default_config()
