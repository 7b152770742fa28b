"""Shared fixtures: the test-field matrix and their Weyl star products."""

import pytest

from src.sampling import random_bidiff_op, rng_for
from src.star import weyl_star_product
from src.structure import Bivector, FieldConfig

FIELDS = {
    "constant_density": ("q1/3", "q2/3", "q3/3"),
    "nonconstant_density": ("q1^2/2", "0", "0"),
    "divergence_free": ("q2", "q3", "q1"),
    "divergence_free_nonlinear": ("q1^2", "-2*q1*q2", "0"),
    "generic": ("q1*q2+q3", "q2^2-q1", "3*q1*q3+1"),
}
MONOPOLES = ("constant_density", "nonconstant_density", "generic")


def make_field(name: str) -> FieldConfig:
    return FieldConfig.from_strings(*FIELDS[name])


@pytest.fixture(params=sorted(FIELDS))
def any_field(request) -> FieldConfig:
    return make_field(request.param)


@pytest.fixture(params=MONOPOLES)
def monopole_field(request) -> FieldConfig:
    return make_field(request.param)


@pytest.fixture
def constant_field() -> FieldConfig:
    return make_field("constant_density")


@pytest.fixture
def nonconstant_field() -> FieldConfig:
    return make_field("nonconstant_density")


@pytest.fixture(params=("divergence_free", "divergence_free_nonlinear"))
def divergence_free_field(request) -> FieldConfig:
    return make_field(request.param)


@pytest.fixture
def constant_sp(constant_field):
    return weyl_star_product(Bivector.from_field(constant_field))


@pytest.fixture
def nonconstant_sp(nonconstant_field):
    return weyl_star_product(Bivector.from_field(nonconstant_field))


@pytest.fixture
def random_b3_pair():
    return (
        random_bidiff_op(rng_for(7, "B3"), name="B3a"),
        random_bidiff_op(rng_for(8, "B3"), name="B3b"),
    )
