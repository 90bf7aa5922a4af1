import pytest

from freshbind import lambda_signature
from freshbind.observations import CARD, EQ, LT, ORD


@pytest.fixture(scope="session")
def lamsig():
    return lambda_signature()


@pytest.fixture(scope="session")
def lamsig_affine():
    return lambda_signature(observations=(EQ, LT))


@pytest.fixture(scope="session")
def lamsig_ord():
    return lambda_signature(observations=(EQ, LT, ORD))


@pytest.fixture(scope="session")
def lamsig_all():
    return lambda_signature(observations=(EQ, LT, ORD, CARD))
