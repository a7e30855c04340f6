import pathlib
import random

import pytest

from cryptvault import paillier, rsa

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent
VECTORS = REPO_ROOT / "vectors"


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


# Key generation is the slow part of the suite; share fixed-seed pairs
# across tests that don't care about generation itself.

@pytest.fixture(scope="session")
def paillier_256():
    return paillier.paillier_generate(256, random.Random(101))


@pytest.fixture(scope="session")
def paillier_512():
    return paillier.paillier_generate(512, random.Random(102))


@pytest.fixture(scope="session")
def rsa_512():
    return rsa.rsa_generate(512, random.Random(103))


@pytest.fixture(scope="session")
def rsa_1024():
    return rsa.rsa_generate(1024, random.Random(104))
