import random

import pytest

from app.models.matrix_models import Mat2Z
from app.utils import create_app
from config import TestConfig

CAT = Mat2Z(2, 1, 1, 1)
SHEAR = Mat2Z(1, 1, 0, 1)
LOWER_SHEAR = Mat2Z(1, 0, 1, 1)


@pytest.fixture
def app():
    return create_app(TestConfig)


@pytest.fixture
def client(app):
    return app.test_client()


@pytest.fixture
def runner(app):
    return app.test_cli_runner()


def random_sl2z(rng, length=8):
    """Palavra aleatória nos geradores elementares de SL(2,Z)."""
    letters = [SHEAR, SHEAR.inverse(), LOWER_SHEAR, LOWER_SHEAR.inverse(), -Mat2Z.identity()]
    M = Mat2Z.identity()
    for _ in range(length):
        M = M @ rng.choice(letters)
    return M


@pytest.fixture
def rng():
    return random.Random(20240601)
