import mpmath as mp
import pytest


@pytest.fixture(autouse=True)
def _ambient_precision():
    """Pin the ambient mpmath precision per test.

    Library code manages its own precision through workdps contexts; the
    ambient setting only affects arithmetic done inside test bodies, which
    assumes ~60 digits for its tolerance checks.
    """
    old = mp.mp.dps
    mp.mp.dps = 60
    yield
    mp.mp.dps = old
