import pytest

from bernconv.presets import (
    biased_singular_spec,
    cantor_spec,
    discrete_spec,
    perturbed_spec,
    two_term_spec,
    uniform_spec,
)


@pytest.fixture
def cantor():
    return cantor_spec()


@pytest.fixture
def uniform():
    return uniform_spec()


@pytest.fixture
def two_term():
    return two_term_spec(0.5)


@pytest.fixture
def discrete():
    return discrete_spec()


@pytest.fixture
def perturbed():
    return perturbed_spec()


@pytest.fixture
def biased():
    return biased_singular_spec()
